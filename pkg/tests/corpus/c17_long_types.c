unsigned long top(long a, unsigned short b, short c, unsigned long d) {
    long t = a - c;
    return (unsigned long)t + b * d;
}
