#include "mdelta/bits.hpp"

#include "mdelta/error.hpp"

namespace mdelta {

Bits parse_bits(std::string_view text) {
  Bits out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1') {
      out.push_back(static_cast<Bit>(c - '0'));
    } else {
      throw PreconditionError("bit string contains '" + std::string(1, c) + "'");
    }
  }
  return out;
}

std::string format_bits(BitView bits) {
  std::string out;
  out.reserve(bits.size());
  for (Bit b : bits) out.push_back(b ? '1' : '0');
  return out;
}

Context Context::parse(std::string_view text) {
  if (text.size() > static_cast<std::size_t>(kMaxContextLength)) {
    throw PreconditionError("context longer than " + std::to_string(kMaxContextLength));
  }
  Context ctx;
  for (char c : text) {
    if (c != '0' && c != '1') throw PreconditionError("context contains '" + std::string(1, c) + "'");
    ctx.bits = (ctx.bits << 1) | static_cast<std::uint32_t>(c - '0');
    ++ctx.length;
  }
  return ctx;
}

std::string Context::to_string() const {
  std::string out(static_cast<std::size_t>(length), '0');
  for (int i = 0; i < length; ++i) {
    if ((bits >> i) & 1U) out[static_cast<std::size_t>(length - 1 - i)] = '1';
  }
  return out;
}

Context Context::suffix(int k) const {
  if (k < 0 || k > length) throw PreconditionError("suffix length out of range");
  return Context{bits & depth_mask(k), k};
}

bool Context::is_suffix_of(const Context& other) const {
  return length <= other.length && (other.bits & depth_mask(length)) == bits;
}

std::uint32_t trailing_state(BitView history, int depth) {
  if (depth < 0 || static_cast<std::size_t>(depth) > history.size()) {
    throw PreconditionError("history shorter than requested depth " + std::to_string(depth));
  }
  std::uint32_t state = 0;
  for (std::size_t i = history.size() - static_cast<std::size_t>(depth); i < history.size(); ++i) {
    state = (state << 1) | history[i];
  }
  return state;
}

std::uint32_t Past::state(int depth) const {
  require(depth, "past");
  return trailing_state(bits_, depth);
}

void Past::require(int depth, std::string_view what) const {
  if (depth < 0 || bits_.size() < static_cast<std::size_t>(depth)) {
    throw PreconditionError(std::string(what) + " has " + std::to_string(bits_.size()) +
                            " bits but depth " + std::to_string(depth) + " is required");
  }
}

}  // namespace mdelta
