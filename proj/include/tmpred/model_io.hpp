#pragma once

#include <iosfwd>
#include <string>

#include "tmpred/lstm.hpp"

namespace tmpred {

// A trained network bundled with what is needed to use it: the window length
// it was trained on and the normalization scale of its inputs and outputs.
struct SavedModel {
    Network net;
    int window = 0;
    double normalizer_scale = 1.0;
};

// Text format, one named field per line, doubles as shortest hex floats so a
// save/load round trip reproduces every weight bit for bit. The first line
// carries a format-version tag.
void save_model(const SavedModel& m, std::ostream& out);
void save_model(const SavedModel& m, const std::string& path);

SavedModel load_model(std::istream& in);
SavedModel load_model(const std::string& path);

}  // namespace tmpred
