#include <qwprobe/cli.hpp>

int main(int argc, char** argv) { return qwprobe::cli_main(argc, argv); }
