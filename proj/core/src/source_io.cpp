#include "mdelta/source_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mdelta/error.hpp"

namespace mdelta {

std::string format_source(const MarkovSource& source, std::string_view comment) {
  std::ostringstream os;
  if (!comment.empty()) {
    std::istringstream lines{std::string(comment)};
    for (std::string line; std::getline(lines, line);) os << "# " << line << '\n';
  }
  os << "memory " << source.memory() << '\n';
  const auto leaves = source.tree().leaves();
  char buf[32];
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", source.theta(i));
    const std::string ctx = leaves[i].length == 0 ? "-" : leaves[i].to_string();
    os << ctx << ' ' << buf << '\n';
  }
  return os.str();
}

MarkovSource parse_source(std::string_view text) {
  std::istringstream in{std::string(text)};
  int declared_memory = -1;
  std::vector<Context> leaves;
  std::vector<double> theta;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    const auto where = " (line " + std::to_string(line_no) + ")";
    if (first == "memory") {
      if (declared_memory >= 0) throw PreconditionError("duplicate memory header" + where);
      if (!(fields >> declared_memory) || declared_memory < 0) throw PreconditionError("bad memory header" + where);
    } else {
      if (declared_memory < 0) throw PreconditionError("context line before memory header" + where);
      std::string value;
      if (!(fields >> value)) throw PreconditionError("context line without a parameter" + where);
      std::size_t used = 0;
      double t = 0.0;
      try {
        t = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size()) throw PreconditionError("bad parameter '" + value + "'" + where);
      leaves.push_back(first == "-" ? Context{} : Context::parse(first));
      theta.push_back(t);
    }
    std::string extra;
    if (fields >> extra) throw PreconditionError("trailing field '" + extra + "'" + where);
  }
  if (declared_memory < 0) throw PreconditionError("source text has no memory header");
  // Pair parameters with leaves before the tree reorders them.
  std::vector<std::pair<Context, double>> pairs;
  for (std::size_t i = 0; i < leaves.size(); ++i) pairs.emplace_back(leaves[i], theta[i]);
  ContextTree tree = ContextTree::from_leaves(leaves);
  if (tree.memory() != declared_memory) {
    throw PreconditionError("memory header says " + std::to_string(declared_memory) + " but leaves imply " +
                            std::to_string(tree.memory()));
  }
  std::vector<double> ordered(tree.size());
  for (const auto& [ctx, t] : pairs) ordered[*tree.find(ctx)] = t;
  return MarkovSource(std::move(tree), std::move(ordered));
}

MarkovSource read_source_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open source file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_source(os.str());
}

void write_source_file(const std::string& path, const MarkovSource& source, std::string_view comment) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write source file '" + path + "'");
  out << format_source(source, comment);
}

}  // namespace mdelta
