#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "mdelta/source_model.hpp"

namespace mdelta {

// Source text format, one record per line:
//
//   # comment
//   memory 2
//   1  0.42
//   01 0.37
//   00 0.55
//
// Contexts are written in time order (last character = most recent bit); the
// empty context of a memory-0 source is written as "-". Parameters use 17
// significant digits, so parse(print(s)) == s.
std::string format_source(const MarkovSource& source, std::string_view comment = {});
MarkovSource parse_source(std::string_view text);

MarkovSource read_source_file(const std::string& path);
void write_source_file(const std::string& path, const MarkovSource& source, std::string_view comment = {});

}  // namespace mdelta
