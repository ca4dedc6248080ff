#include "cli_app.hpp"

int main(int argc, char** argv) { return wgqed::cli::cli_main(argc, argv); }
