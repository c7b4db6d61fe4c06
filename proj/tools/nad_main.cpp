#include <string>
#include <vector>

#include "nad/cli/app.hpp"

int main(int argc, char** argv) {
    return nad::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
