#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace assaykg {

// Environment variable naming the default store snapshot.
inline constexpr const char* kStoreEnv = "ASSAYKG_STORE";
inline constexpr const char* kDefaultStorePath = "assaykg-store.json";

// Runs one CLI invocation. args excludes the program name. Returns the exit
// code; failures print one JSON line {"error":{"code","message"}} to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            std::istream& in = std::cin);

}  // namespace assaykg
