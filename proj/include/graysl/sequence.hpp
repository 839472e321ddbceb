#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graysl/raster.hpp"

namespace graysl {

/// Pattern role inside a captured stream.
///   S1..S3  main-frequency sinusoids
///   G1..GN  Gray-code bits (MSB first)
///   U1..U3  unit-frequency sinusoids (comparison only)
///   M1..M3  (periods - 1)-period sinusoids (comparison only)
struct Role {
  enum class Kind : std::uint8_t { Sinusoid, Gray, Unit, Heterodyne };
  Kind kind = Kind::Sinusoid;
  int index = 1;

  friend bool operator==(const Role&, const Role&) = default;
  friend auto operator<=>(const Role&, const Role&) = default;
};

std::string to_string(const Role& role);
/// Inverse of to_string; throws ParseError.
Role parse_role(const std::string& s);

enum class AssemblyPolicy { Causal, Centered };
AssemblyPolicy parse_assembly_policy(const std::string& s);
std::string to_string(AssemblyPolicy policy);

/// Time-overlapped projection order: S1 S2 S3 G_c per group, c cycling 1..N.
struct Schedule {
  std::vector<Role> entries;
  int n_bits = 4;
  static constexpr int kGroupSize = 4;

  [[nodiscard]] int n_groups() const noexcept {
    return static_cast<int>(entries.size()) / kGroupSize;
  }
};

Schedule make_schedule(int n_groups, int n_bits = 4);

/// Gray bit refreshed by group j (1-based).
int gray_bit_of_group(int j, int n_bits);

/// Frame index (0-based) of role `slot` (0..3) of group j.
constexpr int frame_index(int group, int slot) { return (group - 1) * Schedule::kGroupSize + slot; }

/// Reconstruction input for one output frame: indices into the frame stream.
struct GroupAssembly {
  int group = 0;
  std::array<int, 3> sinusoids{};
  std::vector<int> gray_frames;   // by bit, gray_frames[b-1]
  std::vector<int> gray_groups;   // source group of each bit
  std::vector<int> staleness;     // group - source group (negative = lookahead)
};

/// First group for which a complete set exists under the policy.
int first_complete_group(int n_bits, AssemblyPolicy policy);
/// Last complete group in a stream of n_groups.
int last_complete_group(int n_groups, int n_bits, AssemblyPolicy policy);

/// Assembly for group j from a schedule. Causal: latest G_b at or before j.
/// Centered: G_b from the window j-(N/2)..j+(N/2)-1 (for N=4: j-2..j+1).
/// Throws WarmupError when j has no complete set.
GroupAssembly assemble(const Schedule& schedule, int j, AssemblyPolicy policy = AssemblyPolicy::Causal);

/// Streaming form of causal assembly: feed frame roles in order, collect
/// assemblies as soon as each group's sinusoid triple is complete and all
/// bits have been seen.
class GroupAssembler {
 public:
  explicit GroupAssembler(int n_bits = 4);

  /// Returns the assembly completed by this frame, if any. Throws ParseError
  /// when the role breaks the S1 S2 S3 G cycle.
  std::optional<GroupAssembly> push(const Role& role);

  [[nodiscard]] int frames_seen() const noexcept { return next_index_; }
  [[nodiscard]] int groups_seen() const noexcept { return group_; }

 private:
  int n_bits_;
  int next_index_ = 0;
  int group_ = 0;
  int slot_ = 0;
  std::array<int, 3> sinusoids_{};
  std::vector<int> last_gray_frame_;
  std::vector<int> last_gray_group_;
};

struct Throughput {
  long frames_out = 0;
  double fps = 0.0;
};

/// fps = rate / patterns_per_frame; frames_out = floor(n / 4) - 3 (not below 0)
/// for the overlapped scheme.
Throughput throughput_report(long n_frames, double rate_hz);
/// Non-overlapped grouping (3 sinusoids + N Gray frames per reconstruction).
Throughput throughput_report_sequential(long n_frames, double rate_hz, int n_bits = 4);

/// One manifest line per frame: "index role source-file".
struct ManifestEntry {
  int index = 0;
  Role role;
  std::string file;
};
std::vector<ManifestEntry> parse_frame_manifest(const std::string& text);
std::string format_frame_manifest(const std::vector<ManifestEntry>& entries);

}  // namespace graysl
