// Command-line entry point; see runner.hpp for the experiment machinery.
#include <cstdio>

int main() {
    std::puts("ibpt: experiment runner not wired up yet");
    return 2;
}
