int top(int a, int b) {
    int x = a;
    x += b;
    x -= 3;
    x *= 5;
    x <<= 2;
    x >>= 1;
    x ^= a;
    x |= 0x0f;
    x &= ~b;
    x++;
    x--;
    return x;
}
