void top(const unsigned char in[4], unsigned char out[4]) {
    int i;
    for (i = 0; i < 4; i++)
        out[i] = in[3 - i] ^ 0x5a;
}
