#include "cli_app.hpp"

int main(int argc, char** argv) { return hullmle::cli::run_cli(argc, argv); }
