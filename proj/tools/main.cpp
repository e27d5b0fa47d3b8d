#include "cli_app.hpp"

int main(int argc, char** argv) { return sqz::cli::main_entry(argc, argv); }
