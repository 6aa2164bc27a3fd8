const int table[4] = {3, -1, 0x10, 07};
int counter;

int top(int i) {
    counter = counter + table[i & 3];
    return counter;
}
