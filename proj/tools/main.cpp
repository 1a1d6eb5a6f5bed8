#include "cli_parse.hpp"

int main(int argc, char** argv) {
    const auto parsed = tightfocus::cli::parse_command_line(argc, argv);
    if (!parsed.config) return parsed.exit_code;
    return tightfocus::cli::run(*parsed.config);
}
