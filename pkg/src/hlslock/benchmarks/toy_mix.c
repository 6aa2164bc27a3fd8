int toy_mix(int x, int y, int z) {
    int p = x * y;
    int q = p + z;
    return q > x ? q - y : p ^ z;
}
