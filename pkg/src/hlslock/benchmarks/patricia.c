/* One step of a PATRICIA trie descent: pick a child by a key bit, then test the next bit. */
unsigned int patricia(unsigned int key, unsigned int left, unsigned int right, int b0, int b1) {
    unsigned int next = left;
    unsigned int probe = key >> (b0 & 31);
    if (probe & 1)
        next = right;
    unsigned int diff = key ^ next;
    if (diff >> (b1 & 31))
        return diff | (next & (left + right));
    return next + (key - right);
}
