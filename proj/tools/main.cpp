#include "commands.hpp"

int main(int argc, char** argv) { return fouriernet::cli::run(argc, argv); }
