int top(int a, int out[1]) {
    out[0] = a + 1;
    return 0;
}
