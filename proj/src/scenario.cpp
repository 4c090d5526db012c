namespace moeb {}
