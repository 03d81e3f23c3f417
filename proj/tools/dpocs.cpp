#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "dpocs/cli.hpp"
#include "dpocs/parallel.hpp"

int main(int argc, char** argv) {
    if (const char* env = std::getenv("DPOCS_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n > 0) dpocs::set_thread_count(static_cast<std::size_t>(n));
        } catch (const std::exception&) {
            std::cerr << "dpocs: ignoring invalid DPOCS_THREADS='" << env << "'\n";
        }
    }
    std::vector<std::string> args(argv + 1, argv + argc);
    return dpocs::run_cli(args, std::cout, std::cerr);
}
