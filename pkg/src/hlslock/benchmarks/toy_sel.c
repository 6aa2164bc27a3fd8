unsigned char toy_sel(unsigned char a, unsigned char b, unsigned char s) {
    unsigned char m = a & b;
    unsigned char n = a | s;
    return s < b ? m : n - a;
}
