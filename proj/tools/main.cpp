#include "ddatool.hpp"

int main(int argc, char** argv) { return dda::cli::run(argc, argv); }
