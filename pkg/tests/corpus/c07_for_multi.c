int top(const int v[6], int out[2]) {
    int i;
    int j;
    int lo = 0;
    int hi = 0;
    for (i = 0, j = 5; i < j; i++, j--) {
        lo = lo + v[i];
        hi = hi + v[j];
    }
    out[0] = lo;
    out[1] = hi;
    return lo - hi;
}
