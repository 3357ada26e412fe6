#include "core/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "core/canonical_json.hpp"
#include "core/error.hpp"
#include "core/sequence_io.hpp"

namespace jeanie {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    require(used == value.size() && std::isfinite(v), ErrorCode::InvalidArgument,
            "config key '" + key + "' needs a finite number, got '" + value + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    raise(ErrorCode::InvalidArgument, "config key '" + key + "' needs a number, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  require(ec == std::errc{} && ptr == value.data() + value.size(), ErrorCode::InvalidArgument,
          "config key '" + key + "' needs an integer, got '" + value + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  require(ec == std::errc{} && ptr == value.data() + value.size(), ErrorCode::InvalidArgument,
          "config key '" + key + "' needs an unsigned integer, got '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  raise(ErrorCode::InvalidArgument, "config key '" + key + "' needs true/false, got '" + value + "'");
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options)
    if (v == o) return true;
  return false;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "seed") seed = parse_u64(key, value);
  else if (key == "jobs") jobs = parse_int(key, value);
  else if (key == "geometry.mode") geometry_mode = value;
  else if (key == "geometry.step_deg") step_deg = parse_double(key, value);
  else if (key == "geometry.eta_az") eta_az = parse_int(key, value);
  else if (key == "geometry.eta_alt") eta_alt = parse_int(key, value);
  else if (key == "skeleton.torso_index") torso_index = parse_int(key, value);
  else if (key == "blocking.block_size") block_size = parse_int(key, value);
  else if (key == "blocking.stride_ratio") stride_ratio = parse_double(key, value);
  else if (key == "encoder.mode") encoder_mode = value;
  else if (key == "encoder.backbone") backbone = value;
  else if (key == "encoder.layers") layers = parse_int(key, value);
  else if (key == "encoder.alpha") alpha = parse_double(key, value);
  else if (key == "encoder.feature_dim") feature_dim = parse_int(key, value);
  else if (key == "encoder.out_dim") out_dim = parse_int(key, value);
  else if (key == "encoder.graph") graph = value;
  else if (key == "encoder.dropout") dropout = parse_double(key, value);
  else if (key == "encoder.transformer.enabled") transformer_enabled = parse_bool(key, value);
  else if (key == "encoder.transformer.depth") transformer_depth = parse_int(key, value);
  else if (key == "encoder.transformer.hidden") transformer_hidden = parse_int(key, value);
  else if (key == "encoder.transformer.heads") transformer_heads = parse_int(key, value);
  else if (key == "align.gamma") gamma = parse_double(key, value);
  else if (key == "align.iota") iota = parse_int(key, value);
  else if (key == "align.base") base = value;
  else if (key == "align.sigma") sigma = parse_double(key, value);
  else if (key == "episode.n_way") n_way = parse_int(key, value);
  else if (key == "episode.z_shot") z_shot = parse_int(key, value);
  else if (key == "episode.batch") batch = parse_int(key, value);
  else if (key == "episode.beta") beta = parse_int(key, value);
  else if (key == "episode.episodes") episodes = parse_int(key, value);
  else if (key == "episode.expand_support") expand_support = parse_bool(key, value);
  else if (key == "io.input") io_input = value;
  else if (key == "io.output") io_output = value;
  else if (key == "synth.classes") synth_classes = parse_int(key, value);
  else if (key == "synth.per_class") synth_per_class = parse_int(key, value);
  else if (key == "synth.joints") synth_joints = parse_int(key, value);
  else if (key == "synth.frames") synth_frames = parse_int(key, value);
  else if (key == "synth.view_noise_deg") synth_view_noise_deg = parse_double(key, value);
  else if (key == "synth.coord_noise") synth_coord_noise = parse_double(key, value);
  else if (key == "oracle.trials") oracle_trials = parse_int(key, value);
  else if (key == "bench.grids") bench_grids = value;
  else if (key == "bench.taus") bench_taus = value;
  else if (key == "bench.repeats") bench_repeats = parse_int(key, value);
  else raise(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
}

void RunConfig::validate() const {
  require(one_of(geometry_mode, {"euler", "camvpc"}), ErrorCode::InvalidArgument,
          "geometry.mode must be euler or camvpc");
  require(step_deg > 0.0, ErrorCode::InvalidArgument, "geometry.step_deg must be positive");
  require(eta_az >= 0 && eta_alt >= 0, ErrorCode::InvalidArgument,
          "geometry grid step counts must be nonnegative");
  require(torso_index >= 0, ErrorCode::InvalidArgument, "skeleton.torso_index must be nonnegative");
  require(block_size >= 1, ErrorCode::InvalidArgument, "blocking.block_size must be >= 1");
  require(stride_ratio > 0.0 && stride_ratio <= 1.0, ErrorCode::InvalidArgument,
          "blocking.stride_ratio must be in (0, 1]");
  require(one_of(encoder_mode, {"raw", "network"}), ErrorCode::InvalidArgument,
          "encoder.mode must be raw or network");
  require(one_of(backbone, {"gcn", "sgc", "appnp", "s2gc"}), ErrorCode::InvalidArgument,
          "encoder.backbone must be one of gcn|sgc|appnp|s2gc");
  require(layers >= 1, ErrorCode::InvalidArgument, "encoder.layers must be >= 1");
  require(alpha > 0.0 && alpha <= 1.0, ErrorCode::InvalidArgument,
          "encoder.alpha must be in (0, 1]");
  require(feature_dim >= 1 && out_dim >= 1, ErrorCode::InvalidArgument,
          "encoder dimensions must be >= 1");
  require(dropout >= 0.0 && dropout < 1.0, ErrorCode::InvalidArgument,
          "encoder.dropout must be in [0, 1)");
  require(transformer_depth >= 0 && transformer_hidden >= 1 && transformer_heads >= 1,
          ErrorCode::InvalidArgument, "transformer sizes out of range");
  require(!transformer_enabled || feature_dim % transformer_heads == 0,
          ErrorCode::InvalidArgument, "transformer heads must divide encoder.feature_dim");
  require(gamma > 0.0, ErrorCode::InvalidArgument, "align.gamma must be positive");
  require(iota >= 0, ErrorCode::InvalidArgument, "align.iota must be nonnegative");
  require(one_of(base, {"euclidean", "rbf"}), ErrorCode::InvalidArgument,
          "align.base must be euclidean or rbf");
  require(sigma > 0.0, ErrorCode::InvalidArgument, "align.sigma must be positive");
  require(n_way >= 2 && z_shot >= 1 && batch >= 1, ErrorCode::InvalidArgument,
          "episode.n_way >= 2, episode.z_shot >= 1, episode.batch >= 1 required");
  require(beta >= 1 && beta <= batch * z_shot, ErrorCode::InvalidArgument,
          "episode.beta must be in [1, batch * z_shot]");
  require(episodes >= 0, ErrorCode::InvalidArgument, "episode.episodes must be nonnegative");
  require(jobs >= 1, ErrorCode::InvalidArgument, "jobs must be >= 1");
  require(synth_classes >= 1 && synth_per_class >= 1 && synth_joints >= 1 && synth_frames >= 1,
          ErrorCode::InvalidArgument, "synth.* counts must be >= 1");
  require(synth_view_noise_deg >= 0.0 && synth_coord_noise >= 0.0, ErrorCode::InvalidArgument,
          "synth noise magnitudes must be nonnegative");
  require(oracle_trials >= 0, ErrorCode::InvalidArgument, "oracle.trials must be nonnegative");
  require(bench_repeats >= 1, ErrorCode::InvalidArgument, "bench.repeats must be >= 1");
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::InvalidArgument,
            "config line " + std::to_string(line_no) + " is not 'key = value'");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) { return parse(read_file(path)); }

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["seed"] = std::to_string(seed);
  kv["jobs"] = std::to_string(jobs);
  kv["geometry.mode"] = geometry_mode;
  kv["geometry.step_deg"] = format_double(step_deg);
  kv["geometry.eta_az"] = std::to_string(eta_az);
  kv["geometry.eta_alt"] = std::to_string(eta_alt);
  kv["skeleton.torso_index"] = std::to_string(torso_index);
  kv["blocking.block_size"] = std::to_string(block_size);
  kv["blocking.stride_ratio"] = format_double(stride_ratio);
  kv["encoder.mode"] = encoder_mode;
  kv["encoder.backbone"] = backbone;
  kv["encoder.layers"] = std::to_string(layers);
  kv["encoder.alpha"] = format_double(alpha);
  kv["encoder.feature_dim"] = std::to_string(feature_dim);
  kv["encoder.out_dim"] = std::to_string(out_dim);
  kv["encoder.graph"] = graph;
  kv["encoder.dropout"] = format_double(dropout);
  kv["encoder.transformer.enabled"] = transformer_enabled ? "true" : "false";
  kv["encoder.transformer.depth"] = std::to_string(transformer_depth);
  kv["encoder.transformer.hidden"] = std::to_string(transformer_hidden);
  kv["encoder.transformer.heads"] = std::to_string(transformer_heads);
  kv["align.gamma"] = format_double(gamma);
  kv["align.iota"] = std::to_string(iota);
  kv["align.base"] = base;
  kv["align.sigma"] = format_double(sigma);
  kv["episode.n_way"] = std::to_string(n_way);
  kv["episode.z_shot"] = std::to_string(z_shot);
  kv["episode.batch"] = std::to_string(batch);
  kv["episode.beta"] = std::to_string(beta);
  kv["episode.episodes"] = std::to_string(episodes);
  kv["episode.expand_support"] = expand_support ? "true" : "false";
  kv["io.input"] = io_input;
  kv["io.output"] = io_output;
  kv["synth.classes"] = std::to_string(synth_classes);
  kv["synth.per_class"] = std::to_string(synth_per_class);
  kv["synth.joints"] = std::to_string(synth_joints);
  kv["synth.frames"] = std::to_string(synth_frames);
  kv["synth.view_noise_deg"] = format_double(synth_view_noise_deg);
  kv["synth.coord_noise"] = format_double(synth_coord_noise);
  kv["oracle.trials"] = std::to_string(oracle_trials);
  kv["bench.grids"] = bench_grids;
  kv["bench.taus"] = bench_taus;
  kv["bench.repeats"] = std::to_string(bench_repeats);

  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::string RunConfig::hash() const {
  // fnv-1a 64
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ViewGrid RunConfig::view_grid() const {
  ViewGrid g;
  g.azimuth_steps = eta_az;
  g.altitude_steps = eta_alt;
  g.step_deg = step_deg;
  g.mode = geometry_mode == "camvpc" ? ViewMode::CamVpc : ViewMode::Euler;
  return g;
}

BlockingParams RunConfig::blocking() const {
  return BlockingParams::from_ratio(block_size, stride_ratio);
}

EncoderConfig RunConfig::encoder() const {
  EncoderConfig e;
  e.mode = encoder_mode == "network" ? FeatureMode::Network : FeatureMode::Raw;
  if (backbone == "gcn") e.backbone = GnnVariant::Gcn;
  else if (backbone == "sgc") e.backbone = GnnVariant::Sgc;
  else if (backbone == "appnp") e.backbone = GnnVariant::Appnp;
  else e.backbone = GnnVariant::S2gc;
  e.layers = layers;
  e.alpha = alpha;
  e.feature_dim = feature_dim;
  e.out_dim = out_dim;
  e.graph = graph;
  e.dropout = dropout;
  e.transformer.enabled = transformer_enabled;
  e.transformer.depth = transformer_depth;
  e.transformer.hidden = transformer_hidden;
  e.transformer.heads = transformer_heads;
  e.seed = seed;
  return e;
}

AlignmentParams RunConfig::alignment() const {
  AlignmentParams a;
  a.gamma = gamma;
  a.iota = iota;
  a.base = base == "euclidean" ? BaseDistanceKind::Euclidean : BaseDistanceKind::Rbf;
  a.sigma = sigma;
  return a;
}

EpisodeRunParams RunConfig::episode_params(AlignMethod method) const {
  EpisodeRunParams p;
  p.n_way = n_way;
  p.z_shot = z_shot;
  p.episodes = episodes;
  p.seed = seed;
  p.expand_support = expand_support;
  p.method = method;
  p.jobs = jobs;
  p.torso_index = torso_index;
  p.grid = view_grid();
  p.blocking = blocking();
  p.encoder = encoder();
  p.align = alignment();
  return p;
}

}  // namespace jeanie
