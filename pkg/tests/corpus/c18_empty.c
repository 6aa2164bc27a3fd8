void top(void) {
}
