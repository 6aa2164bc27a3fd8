int top(int a) {
    int b = -a;
    int c = ~b;
    int d = !c;
    return -(-b) + ~~c + d + +a;
}
