#include "ccrm/io.hpp"

int main(int argc, char** argv) { return ccrm::cli_main(argc, argv); }
