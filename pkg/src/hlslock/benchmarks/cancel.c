/* Two additions compared for equality.  Locked alone, either one corrupts the
   result under half the wrong keys; locked together, their errors overlap. */
int same(int a, int b) {
    return a == b;
}

int cancel(int x, int y) {
    int a = x + y;
    int b = y + x;
    return -same(a, b);
}
