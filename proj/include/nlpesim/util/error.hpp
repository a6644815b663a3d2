#pragma once

#include <stdexcept>
#include <string>

namespace nlpesim {

// Error taxonomy. The CLI maps config_error to exit code 2, missing_artifact
// to 3, and everything else thrown by a stage to 1.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class missing_artifact_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nlpesim
