#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "autoens/error.hpp"
#include "autoens/rng.hpp"
#include "autoens/subnetwork.hpp"

#include "json.hpp"

namespace autoens {

// Parameters of one subnetwork inside the checkpoint blob.
struct SubnetworkState {
  std::string id;
  std::vector<double> flat_params;
  std::uint64_t steps_done = 0;

  bool operator==(const SubnetworkState&) const = default;
};

// The unit of bookkeeping, warm-start, and fault recovery. Metadata is a
// structured text document (architecture of the best ensemble); parameters
// are a flat, ordered binary section with a per-subnetwork manifest.
struct Checkpoint {
  std::uint64_t iteration_number = 0;
  nlohmann::json architecture_metadata;
  std::vector<SubnetworkState> subnetwork_states;
  std::vector<double> mixture_weights;
  std::uint64_t train_step = 0;

  bool operator==(const Checkpoint& other) const {
    return iteration_number == other.iteration_number &&
           architecture_metadata == other.architecture_metadata &&
           subnetwork_states == other.subnetwork_states &&
           mixture_weights == other.mixture_weights &&
           train_step == other.train_step;
  }
};

namespace detail {

inline constexpr char kBlobMagic[8] = {'A', 'E', 'N', 'S', 'P', 'B', '0', '1'};

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u64(out, bits);
}

class BlobReader {
 public:
  explicit BlobReader(const std::string& bytes) : bytes_(bytes) {}

  std::uint64_t u64() {
    require(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(
               static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }

  std::string str(std::size_t len) {
    require(len);
    std::string s = bytes_.substr(pos_, len);
    pos_ += len;
    return s;
  }

  bool exhausted() const { return pos_ == bytes_.size(); }

 private:
  void require(std::size_t n) const {
    if (pos_ + n > bytes_.size()) {
      throw CheckpointError("parameter blob truncated");
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string encode_parameter_blob(const Checkpoint& c) {
  std::string out(detail::kBlobMagic, sizeof(detail::kBlobMagic));
  detail::put_u64(out, c.subnetwork_states.size());
  for (const SubnetworkState& s : c.subnetwork_states) {
    detail::put_u64(out, s.id.size());
    out += s.id;
    detail::put_u64(out, s.steps_done);
    detail::put_u64(out, s.flat_params.size());
    for (double v : s.flat_params) detail::put_f64(out, v);
  }
  detail::put_u64(out, c.mixture_weights.size());
  for (double v : c.mixture_weights) detail::put_f64(out, v);
  detail::put_u64(out, c.train_step);
  return out;
}

inline void decode_parameter_blob(const std::string& bytes, Checkpoint& c) {
  if (bytes.size() < sizeof(detail::kBlobMagic) ||
      std::memcmp(bytes.data(), detail::kBlobMagic,
                  sizeof(detail::kBlobMagic)) != 0) {
    throw CheckpointError("parameter blob has a bad magic header");
  }
  detail::BlobReader reader(bytes.substr(sizeof(detail::kBlobMagic)));
  const std::uint64_t num_subnetworks = reader.u64();
  c.subnetwork_states.clear();
  for (std::uint64_t i = 0; i < num_subnetworks; ++i) {
    SubnetworkState s;
    const std::uint64_t id_len = reader.u64();
    s.id = reader.str(id_len);
    s.steps_done = reader.u64();
    const std::uint64_t n = reader.u64();
    s.flat_params.reserve(n);
    for (std::uint64_t j = 0; j < n; ++j) s.flat_params.push_back(reader.f64());
    c.subnetwork_states.push_back(std::move(s));
  }
  const std::uint64_t num_weights = reader.u64();
  c.mixture_weights.clear();
  for (std::uint64_t j = 0; j < num_weights; ++j) {
    c.mixture_weights.push_back(reader.f64());
  }
  c.train_step = reader.u64();
  if (!reader.exhausted()) {
    throw CheckpointError("parameter blob has trailing bytes");
  }
}

struct CheckpointName {
  std::uint64_t iteration = 0;
  std::uint64_t step = 0;

  std::string stem() const {
    return "ckpt-" + std::to_string(iteration) + "-" + std::to_string(step);
  }
};

inline std::optional<CheckpointName> parse_checkpoint_stem(
    const std::string& filename) {
  // Expected: ckpt-<t>-<step>.digest
  if (filename.rfind("ckpt-", 0) != 0) return std::nullopt;
  const auto ext = filename.rfind(".digest");
  if (ext == std::string::npos || ext + 7 != filename.size()) {
    return std::nullopt;
  }
  const std::string core = filename.substr(5, ext - 5);
  const auto dash = core.find('-');
  if (dash == std::string::npos) return std::nullopt;
  try {
    CheckpointName name;
    name.iteration = std::stoull(core.substr(0, dash));
    name.step = std::stoull(core.substr(dash + 1));
    return name;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return bytes;
}

inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw CheckpointError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace detail

// Writes ckpt-<t>-<step>.{meta,params,digest}. Each file lands via a
// temp-file rename; the digest file goes last and marks the commit point, so
// a crash at any moment leaves either no visible checkpoint or a complete one.
inline std::filesystem::path save_checkpoint(const Checkpoint& c,
                                             const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  CheckpointName name{c.iteration_number, c.train_step};
  const std::string meta = c.architecture_metadata.dump(2);
  const std::string params = encode_parameter_blob(c);
  const std::string digest = "meta " + detail::hex64(fnv1a64(meta)) +
                             "\nparams " + detail::hex64(fnv1a64(params)) + "\n";
  detail::write_file_atomic(dir / (name.stem() + ".meta"), meta);
  detail::write_file_atomic(dir / (name.stem() + ".params"), params);
  detail::write_file_atomic(dir / (name.stem() + ".digest"), digest);
  return dir / (name.stem() + ".digest");
}

// Committed checkpoints in the directory, newest first by (iteration, step).
inline std::vector<CheckpointName> list_checkpoints(
    const std::filesystem::path& dir) {
  std::vector<CheckpointName> names;
  if (!std::filesystem::exists(dir)) return names;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto parsed = parse_checkpoint_stem(entry.path().filename().string());
    if (parsed.has_value()) names.push_back(*parsed);
  }
  std::sort(names.begin(), names.end(),
            [](const CheckpointName& a, const CheckpointName& b) {
              if (a.iteration != b.iteration) return a.iteration > b.iteration;
              return a.step > b.step;
            });
  return names;
}

inline Checkpoint load_checkpoint_named(const std::filesystem::path& dir,
                                        const CheckpointName& name) {
  const std::string meta = detail::read_file(dir / (name.stem() + ".meta"));
  const std::string params = detail::read_file(dir / (name.stem() + ".params"));
  const std::string digest = detail::read_file(dir / (name.stem() + ".digest"));
  const std::string expected = "meta " + detail::hex64(fnv1a64(meta)) +
                               "\nparams " + detail::hex64(fnv1a64(params)) +
                               "\n";
  if (digest != expected) {
    throw CheckpointError("digest mismatch for " + name.stem());
  }
  Checkpoint c;
  c.iteration_number = name.iteration;
  c.architecture_metadata = nlohmann::json::parse(meta);
  decode_parameter_blob(params, c);
  return c;
}

// Latest valid checkpoint; files failing digest verification (or unreadable)
// are skipped in favor of the next-newest one.
inline std::optional<Checkpoint> try_load_checkpoint(
    const std::filesystem::path& dir) {
  for (const CheckpointName& name : list_checkpoints(dir)) {
    try {
      return load_checkpoint_named(dir, name);
    } catch (const Error&) {
      continue;  // corrupt or torn; fall back to the previous one
    } catch (const nlohmann::json::exception&) {
      continue;
    }
  }
  return std::nullopt;
}

inline Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  auto c = try_load_checkpoint(dir);
  if (!c.has_value()) {
    throw CheckpointError("no valid checkpoint in " + dir.string());
  }
  return *c;
}

}  // namespace autoens
