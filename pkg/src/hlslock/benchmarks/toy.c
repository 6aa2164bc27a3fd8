int toy(int x, int y) {
    int r = x + 3;
    if (r > y)
        r = r * y;
    else
        r = r - y;
    return r ^ (x & 5);
}
