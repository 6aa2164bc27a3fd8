/* Auto-regressive lattice filter: 16 multiplications, 12 additions. */
int arf(int x1, int x2, int x3, int x4,
        int c1, int c2, int c3, int c4, int c5, int c6, int c7, int c8,
        int c9, int c10, int c11, int c12, int c13, int c14, int c15, int c16) {
    int t1 = c1 * x1 + c2 * x2;
    int t2 = c3 * x3 + c4 * x4;
    int t3 = c5 * x1 + c6 * x2;
    int t4 = c7 * x3 + c8 * x4;
    int u1 = c9 * t1 + c10 * t2;
    int u2 = c11 * t3 + c12 * t4;
    int u3 = c13 * t1 + c14 * t3;
    int u4 = c15 * t2 + c16 * t4;
    return u1 + u2 + u3 + u4 + x1;
}
