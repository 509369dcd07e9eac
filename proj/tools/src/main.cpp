#include "app.hpp"

int main(int argc, char** argv) { return ccge::cli::run(argc, argv); }
