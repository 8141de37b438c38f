#include <cstdio>
int main() { std::puts("exloop cli placeholder"); return 0; }
