/* Branch-free bubble sort of eight words; returns the number of swaps. */
int bubblesort(int a[8]) {
    int swaps = 0;
    int i;
    int j;
    for (i = 7; i; i--) {
        for (j = 1; j <= i; j++) {
            int k = j - 1;
            int x = a[k];
            int y = a[j];
            int lt = x < y;
            a[k] = y + (x - y) * lt;
            a[j] = x + (y - x) * lt;
            swaps = swaps + (y < x);
        }
    }
    return swaps;
}
