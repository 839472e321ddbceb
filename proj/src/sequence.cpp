#include "graysl/sequence.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace graysl {

namespace {

char kind_letter(Role::Kind kind) {
  switch (kind) {
    case Role::Kind::Sinusoid: return 'S';
    case Role::Kind::Gray: return 'G';
    case Role::Kind::Unit: return 'U';
    case Role::Kind::Heterodyne: return 'M';
  }
  return '?';
}

void check_bits(int n_bits) {
  if (n_bits < 1 || n_bits > 16) throw ConfigError("gray bit count must be in [1, 16]");
}

}  // namespace

std::string to_string(const Role& role) {
  return std::string(1, kind_letter(role.kind)) + std::to_string(role.index);
}

Role parse_role(const std::string& s) {
  if (s.size() < 2) throw ParseError("bad role '" + s + "'");
  Role r;
  switch (s[0]) {
    case 'S': r.kind = Role::Kind::Sinusoid; break;
    case 'G': r.kind = Role::Kind::Gray; break;
    case 'U': r.kind = Role::Kind::Unit; break;
    case 'M': r.kind = Role::Kind::Heterodyne; break;
    default: throw ParseError("bad role '" + s + "'");
  }
  const char* first = s.data() + 1;
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, r.index);
  if (ec != std::errc{} || ptr != last || r.index < 1) throw ParseError("bad role '" + s + "'");
  if (r.kind != Role::Kind::Gray && r.index > 3) throw ParseError("bad role '" + s + "'");
  return r;
}

AssemblyPolicy parse_assembly_policy(const std::string& s) {
  if (s == "causal") return AssemblyPolicy::Causal;
  if (s == "centered") return AssemblyPolicy::Centered;
  throw ConfigError("unknown assembly policy '" + s + "' (expected causal or centered)");
}

std::string to_string(AssemblyPolicy policy) {
  return policy == AssemblyPolicy::Causal ? "causal" : "centered";
}

int gray_bit_of_group(int j, int n_bits) { return (j - 1) % n_bits + 1; }

Schedule make_schedule(int n_groups, int n_bits) {
  if (n_groups < 1) throw ConfigError("schedule needs at least one group");
  check_bits(n_bits);
  Schedule s;
  s.n_bits = n_bits;
  s.entries.reserve(static_cast<std::size_t>(n_groups) * Schedule::kGroupSize);
  for (int j = 1; j <= n_groups; ++j) {
    for (int n = 1; n <= 3; ++n) s.entries.push_back({Role::Kind::Sinusoid, n});
    s.entries.push_back({Role::Kind::Gray, gray_bit_of_group(j, n_bits)});
  }
  return s;
}

int first_complete_group(int n_bits, AssemblyPolicy policy) {
  return policy == AssemblyPolicy::Causal ? n_bits : n_bits / 2 + 1;
}

int last_complete_group(int n_groups, int n_bits, AssemblyPolicy policy) {
  return policy == AssemblyPolicy::Causal ? n_groups : n_groups - (n_bits - n_bits / 2 - 1);
}

GroupAssembly assemble(const Schedule& schedule, int j, AssemblyPolicy policy) {
  const int n_bits = schedule.n_bits;
  const int first = first_complete_group(n_bits, policy);
  const int last = last_complete_group(schedule.n_groups(), n_bits, policy);
  if (j < first) {
    throw WarmupError("group " + std::to_string(j) + " precedes the first complete window (group " +
                      std::to_string(first) + ")");
  }
  if (j > last) {
    throw WarmupError("group " + std::to_string(j) + " needs frames beyond the end of the stream");
  }
  GroupAssembly a;
  a.group = j;
  for (int n = 0; n < 3; ++n) a.sinusoids[static_cast<std::size_t>(n)] = frame_index(j, n);
  a.gray_frames.assign(static_cast<std::size_t>(n_bits), -1);
  a.gray_groups.assign(static_cast<std::size_t>(n_bits), 0);
  a.staleness.assign(static_cast<std::size_t>(n_bits), 0);
  const int lo = policy == AssemblyPolicy::Causal ? j - n_bits + 1 : j - n_bits / 2;
  for (int g = lo; g < lo + n_bits; ++g) {
    const auto b = static_cast<std::size_t>(gray_bit_of_group(g, n_bits) - 1);
    a.gray_frames[b] = frame_index(g, 3);
    a.gray_groups[b] = g;
    a.staleness[b] = j - g;
  }
  return a;
}

GroupAssembler::GroupAssembler(int n_bits)
    : n_bits_(n_bits),
      last_gray_frame_(static_cast<std::size_t>(n_bits), -1),
      last_gray_group_(static_cast<std::size_t>(n_bits), 0) {
  check_bits(n_bits);
}

std::optional<GroupAssembly> GroupAssembler::push(const Role& role) {
  const int index = next_index_;
  if (slot_ < 3) {
    if (role.kind != Role::Kind::Sinusoid || role.index != slot_ + 1) {
      throw ParseError("frame " + std::to_string(index) + ": expected S" + std::to_string(slot_ + 1) +
                       ", got " + to_string(role));
    }
    if (slot_ == 0) ++group_;
    sinusoids_[static_cast<std::size_t>(slot_)] = index;
    ++slot_;
    ++next_index_;
    return std::nullopt;
  }
  if (role.kind != Role::Kind::Gray || role.index != gray_bit_of_group(group_, n_bits_)) {
    throw ParseError("frame " + std::to_string(index) + ": expected G" +
                     std::to_string(gray_bit_of_group(group_, n_bits_)) + ", got " + to_string(role));
  }
  const auto b = static_cast<std::size_t>(role.index - 1);
  last_gray_frame_[b] = index;
  last_gray_group_[b] = group_;
  slot_ = 0;
  ++next_index_;
  if (std::ranges::any_of(last_gray_frame_, [](int f) { return f < 0; })) return std::nullopt;
  GroupAssembly a;
  a.group = group_;
  a.sinusoids = sinusoids_;
  a.gray_frames = last_gray_frame_;
  a.gray_groups = last_gray_group_;
  a.staleness.resize(last_gray_group_.size());
  for (std::size_t i = 0; i < last_gray_group_.size(); ++i) a.staleness[i] = group_ - last_gray_group_[i];
  return a;
}

Throughput throughput_report(long n_frames, double rate_hz) {
  if (!(rate_hz > 0.0)) throw RangeError("frame rate must be positive");
  if (n_frames < 0) throw RangeError("frame count must be non-negative");
  return {std::max(0L, n_frames / Schedule::kGroupSize - 3), rate_hz / Schedule::kGroupSize};
}

Throughput throughput_report_sequential(long n_frames, double rate_hz, int n_bits) {
  if (!(rate_hz > 0.0)) throw RangeError("frame rate must be positive");
  if (n_frames < 0) throw RangeError("frame count must be non-negative");
  const int per = 3 + n_bits;
  return {n_frames / per, rate_hz / per};
}

std::vector<ManifestEntry> parse_frame_manifest(const std::string& text) {
  std::vector<ManifestEntry> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ManifestEntry e;
    std::string role;
    if (!(ls >> e.index >> role >> e.file)) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": expected 'index role file'");
    }
    e.role = parse_role(role);
    out.push_back(std::move(e));
  }
  return out;
}

std::string format_frame_manifest(const std::vector<ManifestEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += std::to_string(e.index) + " " + to_string(e.role) + " " + e.file + "\n";
  }
  return out;
}

}  // namespace graysl
