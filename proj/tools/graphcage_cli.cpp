// graphcage command-line front end: partition, run, simulate.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graphcage/graphcage.hpp"

using namespace graphcage;

namespace {

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GraphArgs {
  std::string input;
  std::string gen;
  std::string format = "auto";
  bool symmetrize = false;
  count_t num_vertices = 0;
};

struct ExecArgs {
  int threads = 0;
  bool deterministic = false;
  std::string schedule = "chunked";
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

count_t parse_count(const std::string& s) {
  try {
    std::size_t pos = 0;
    if (s.rfind("2^", 0) == 0) {
      unsigned long e = std::stoul(s.substr(2), &pos);
      if (pos != s.size() - 2 || e > 62) throw usage_error("bad power: " + s);
      return count_t{1} << e;
    }
    unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw usage_error("not a count: " + s);
    return v;
  } catch (const std::logic_error&) {
    throw usage_error("not a count: " + s);
  }
}

// "2^a..2^b" expands to every power of two in between; otherwise a comma list.
std::vector<count_t> parse_widths(const std::string& s) {
  if (auto dots = s.find(".."); dots != std::string::npos) {
    count_t lo = parse_count(s.substr(0, dots)), hi = parse_count(s.substr(dots + 2));
    if (!is_power_of_two(lo) || lo > hi) throw usage_error("bad width range: " + s);
    std::vector<count_t> out;
    for (count_t w = lo; w <= hi; w *= 2) out.push_back(w);
    return out;
  }
  std::vector<count_t> out;
  for (const auto& tok : split(s, ',')) out.push_back(parse_count(tok));
  if (out.empty()) throw usage_error("empty widths list");
  for (count_t w : out)
    if (w == 0) throw usage_error("width must be >= 1");
  return out;
}

CsrGraph load_graph(const GraphArgs& a, std::string& label) {
  if (a.input.empty() == a.gen.empty()) throw usage_error("exactly one of --input or --gen is required");
  CsrGraph g;
  if (!a.gen.empty()) {
    auto parts = split(a.gen, ':');
    GraphGenSpec spec;
    try {
      if (parts.at(0) == "rmat") {
        spec = {GenKind::rmat, static_cast<unsigned>(std::stoul(parts.at(1))), 0, std::stoull(parts.at(2)),
                parts.size() > 3 ? std::stoull(parts.at(3)) : 1};
      } else {
        static const std::pair<const char*, GenKind> kinds[] = {
            {"path", GenKind::path}, {"cycle", GenKind::cycle}, {"star", GenKind::star}, {"complete", GenKind::complete}};
        bool found = false;
        for (auto [name, kind] : kinds)
          if (parts.at(0) == name) spec = {kind, 0, std::stoull(parts.at(1)), 0, 0}, found = true;
        if (!found) throw usage_error("unknown generator: " + a.gen);
      }
    } catch (const std::logic_error&) {
      throw usage_error("bad --gen spec: " + a.gen);
    }
    g = generate(spec);
    label = a.gen;
  } else {
    std::string fmt = a.format;
    if (fmt == "auto") fmt = std::filesystem::path(a.input).extension() == ".mtx" ? "mtx" : "el";
    if (fmt == "mtx") {
      g = load_matrix_market(a.input);
    } else if (fmt == "el") {
      EdgeListOptions opts;
      if (a.num_vertices) opts.num_vertices = a.num_vertices;
      g = load_edge_list(a.input, opts);
    } else {
      throw usage_error("unknown --format " + fmt);
    }
    label = std::filesystem::path(a.input).stem().string();
  }
  if (a.symmetrize) g = symmetrize(g);
  return g;
}

void add_graph_flags(CLI::App* app, GraphArgs& a) {
  app->add_option("--input", a.input, "edge list (.el) or MatrixMarket (.mtx) file");
  app->add_option("--gen", a.gen, "rmat:SCALE:EF:SEED | path:N | star:N | cycle:N | complete:N");
  app->add_option("--format", a.format, "el | mtx | auto")->check(CLI::IsMember({"el", "mtx", "auto"}));
  app->add_flag("--symmetrize", a.symmetrize, "add reverse edges");
  app->add_option("--num-vertices", a.num_vertices, "vertex count for edge lists");
}

void add_exec_flags(CLI::App* app, ExecArgs& a) {
  app->add_option("--threads", a.threads, "worker threads (default: GRAPHCAGE_THREADS or 1)");
  app->add_flag("--deterministic", a.deterministic, "canonical serial order");
  app->add_option("--schedule", a.schedule, "serial | chunked | edge")
      ->check(CLI::IsMember({"serial", "chunked", "edge"}));
}

ExecutionPolicy make_policy(const ExecArgs& a) {
  ExecutionPolicy pol;
  pol.threads = a.threads > 0 ? a.threads : threads_from_env(1);
  pol.deterministic = a.deterministic || pol.threads <= 1;
  if (a.schedule == "serial") pol.schedule = SerialRows{};
  else if (a.schedule == "edge") pol.schedule = EdgeBalanced{};
  else pol.schedule = ChunkedRows{};
  return pol;
}

Direction parse_direction(const std::string& s) { return s == "push" ? Direction::push : Direction::pull; }

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw io_error("cannot open output file '" + path + "'");
  return file;
}

// ---- partition ----------------------------------------------------------

struct PartitionArgs {
  GraphArgs graph;
  std::string direction = "pull";
  std::string scheme = "tocab";
  std::string width = "262144";
  std::string out;
};

int cmd_partition(const PartitionArgs& a) {
  std::string label;
  CsrGraph g = load_graph(a.graph, label);
  const Direction dir = parse_direction(a.direction);
  const count_t width = parse_count(a.width);
  if (width == 0) throw usage_error("width must be >= 1");
  if (a.scheme == "cb" && dir != Direction::pull) throw usage_error("conventional blocking is pull only");
  // Pull blocks the transpose; push blocks the forward graph.
  const CsrGraph src = dir == Direction::pull ? transpose(g) : g;
  g = CsrGraph{};
  BlockedGraph bg = a.scheme == "cb" ? partition_cb(src, width) : partition_tocab(src, dir, width);
  if (!a.out.empty()) write_gcb(bg, a.out);
  auto st = block_stats(bg);
  std::cout << "graph: " << label << '\n'
            << "vertices: " << bg.num_vertices() << '\n'
            << "edges: " << bg.num_edges() << '\n'
            << "direction: " << to_string(dir) << '\n'
            << "width: " << width << '\n'
            << "blocks: " << bg.num_blocks() << '\n'
            << "local_rows: " << bg.total_local_rows() << '\n';
  auto orig = degree_histogram(src);
  for (std::size_t i = 0; i < kDegreeBinLabels.size(); ++i)
    std::cout << "degree " << kDegreeBinLabels[i] << ": original " << format_real(orig[i]) << " blocked "
              << format_real(st.fraction(i)) << '\n';
  return 0;
}

// ---- run ----------------------------------------------------------------

struct RunArgs {
  GraphArgs graph;
  ExecArgs exec;
  std::string kernel;
  std::string mode = "baseline-pull";
  std::string width = "262144";
  count_t k = kDefaultRangeWidth;
  double damping = 0.85;
  double tol = 1e-4;
  count_t max_iters = 100;
  count_t reps = 10;
  bool verify = false;
  std::optional<count_t> source;
  count_t sources = 1;
  std::uint64_t seed = 1;
  count_t cache_capacity = kDefaultCacheBytes;
  std::string out;
};

struct KernelOutput {
  std::vector<double> values;
  count_t iterations = 0;
};

double checksum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

std::vector<double> levels_as_values(const std::vector<level_t>& d) {
  std::vector<double> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i] == kUnvisited ? -1.0 : static_cast<double>(d[i]);
  return out;
}

int cmd_run(const RunArgs& a) {
  static const std::vector<std::string> value_modes{"baseline-pull", "baseline-push", "cb", "tocab-pull",
                                                    "tocab-push"};
  static const std::vector<std::string> traversal_modes{"baseline-pull", "baseline-push", "tocab-pull", "hybrid"};
  const bool traversal = a.kernel == "bc" || a.kernel == "bfs";
  const auto& allowed = traversal ? traversal_modes : value_modes;
  if (std::find(allowed.begin(), allowed.end(), a.mode) == allowed.end())
    throw usage_error("mode '" + a.mode + "' is not available for kernel " + a.kernel);
  if (a.reps == 0) throw usage_error("--reps must be >= 1");

  std::string label;
  const CsrGraph g = load_graph(a.graph, label);
  const count_t n = g.num_vertices();
  const count_t width = parse_count(a.width);
  if (width == 0 || a.k == 0) throw usage_error("width and k must be >= 1");
  const ExecutionPolicy pol = make_policy(a.exec);
  const PrParams pr{a.damping, a.tol, a.max_iters, false};
  pr.validate();

  // Preprocessing, excluded from timing.
  std::optional<CsrGraph> gt;
  std::optional<BlockedGraph> bg;
  auto transposed = [&]() -> const CsrGraph& {
    if (!gt) gt = transpose(g);
    return *gt;
  };
  std::vector<vertex_id> srcs;
  DirectionPolicy dpol;
  dpol.cache_capacity_bytes = a.cache_capacity;
  if (traversal) {
    if (n == 0) throw usage_error("traversal needs a non-empty graph");
    if (a.source) {
      if (*a.source >= n) throw usage_error("source out of range");
      srcs = {static_cast<vertex_id>(*a.source)};
    } else {
      srcs = sample_sources(n, a.kernel == "bfs" ? 1 : a.sources, a.seed);
    }
    if (a.mode == "baseline-push") dpol.mode = DirectionMode::force_push;
    else if (a.mode == "hybrid") dpol.mode = DirectionMode::automatic;
    else dpol.mode = DirectionMode::force_pull;
    // Unblocked pull is blocked pull with one block.
    if (a.mode != "baseline-push")
      bg = partition_tocab(transposed(), Direction::pull, a.mode == "baseline-pull" ? std::max<count_t>(n, 1) : width);
  } else if (a.kernel == "pr") {
    if (a.mode == "baseline-pull") transposed();
    else if (a.mode == "cb") bg = partition_cb(transposed(), width);
    else if (a.mode == "tocab-pull") bg = partition_tocab(transposed(), Direction::pull, width);
    else if (a.mode == "tocab-push") bg = partition_tocab(g, Direction::push, width);
  } else {
    // SpMV: the graph is the matrix, rows are outputs.
    if (a.mode == "baseline-push") transposed();
    else if (a.mode == "cb") bg = partition_cb(g, width);
    else if (a.mode == "tocab-pull") bg = partition_tocab(g, Direction::pull, width);
    else if (a.mode == "tocab-push") bg = partition_tocab(transposed(), Direction::push, width);
  }
  std::vector<double> x(n, 1.0);

  auto compute = [&]() -> KernelOutput {
    if (a.kernel == "pr") {
      PrResult r;
      if (a.mode == "baseline-pull") r = pr_baseline(*gt, Direction::pull, pr, pol);
      else if (a.mode == "baseline-push") r = pr_baseline(g, Direction::push, pr, pol);
      else r = pr_blocked(*bg, bg->direction(), pr, a.k, pol);
      return {std::move(r.ranks), r.iterations};
    }
    if (a.kernel == "spmv") {
      if (a.mode == "baseline-pull") return {spmv(g, x, pol), 1};
      if (a.mode == "baseline-push") {
        std::vector<double> y(n);
        scatter_push(*gt, x, y, pol);
        return {std::move(y), 1};
      }
      return {spmv(*bg, x, a.k, pol), 1};
    }
    if (a.kernel == "bfs") return {levels_as_values(bfs(g, bg ? &*bg : nullptr, srcs[0], dpol, a.k, pol)), 1};
    return {betweenness(g, bg ? &*bg : nullptr, srcs, dpol, a.k, pol).centrality, srcs.size()};
  };

  KernelOutput result;
  double total_ms = 0.0;
  for (count_t r = 0; r < a.reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    result = compute();
    auto t1 = std::chrono::steady_clock::now();
    total_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
  }

  bool verified = true;
  if (a.verify) {
    const ExecutionPolicy serial{};
    std::vector<double> ref;
    double tol = 0.0;
    if (a.kernel == "pr") {
      ref = pr_baseline(transposed(), Direction::pull, pr, serial).ranks;
      tol = 1e-10 * static_cast<double>(std::max<count_t>(n, 1));
    } else if (a.kernel == "spmv") {
      ref = spmv(g, x, serial);
      tol = 1e-9;
    } else if (a.kernel == "bfs") {
      ref = levels_as_values(bfs(g, nullptr, srcs[0], {DirectionMode::force_push}));
    } else {
      ref = betweenness(g, nullptr, srcs, {DirectionMode::force_push}).centrality;
      tol = 1e-9;
    }
    for (std::size_t i = 0; i < ref.size() && verified; ++i)
      verified = std::abs(ref[i] - result.values[i]) <= tol * (a.kernel == "bc" ? std::max(1.0, std::abs(ref[i])) : 1.0);
    std::cerr << "verify: " << (verified ? "PASS" : "FAIL") << '\n';
  }

  std::ofstream file;
  std::ostream& os = open_out(a.out, file);
  os << "graph,kernel,mode,width,k,iterations,wall_time_ms,miss_rate,misses_per_edge,checksum\n";
  const bool blocked = a.mode == "cb" || a.mode.rfind("tocab", 0) == 0 || a.mode == "hybrid";
  os << label << ',' << a.kernel << ',' << a.mode << ',' << (blocked ? width : 0) << ',' << a.k << ','
     << result.iterations << ',' << format_real(total_ms / static_cast<double>(a.reps)) << ",,,"
     << format_real(checksum(result.values)) << '\n';
  return verified ? 0 : 3;
}

// ---- simulate -----------------------------------------------------------

struct SimulateArgs {
  GraphArgs graph;
  std::string kernel = "pr";
  std::string modes;
  std::string widths;
  bool sweep = false;
  count_t k = kDefaultRangeWidth;
  count_t iterations = 1;
  double damping = 0.85;
  count_t capacity = 2'883'584;
  count_t line = 128;
  count_t assoc = 16;
  std::string bypass;
  bool index_streams = false;
  count_t source = 0;
  std::string out;
};

TraceKernel trace_kernel_for(const std::string& kernel, const std::string& mode) {
  if (kernel == "bc") {
    if (mode == "baseline-push") return TraceKernel::bc_push;
    if (mode == "tocab-pull") return TraceKernel::bc_pull;
    if (mode == "hybrid") return TraceKernel::bc_hybrid;
    throw usage_error("mode '" + mode + "' is not available for bc");
  }
  if (kernel != "pr" && kernel != "spmv") throw usage_error("simulate supports pr, spmv and bc");
  static const std::pair<const char*, const char*> names[] = {{"baseline-pull", "pull-baseline"},
                                                             {"baseline-push", "push-baseline"},
                                                             {"cb", "cb"},
                                                             {"tocab-pull", "tocab-pull"},
                                                             {"tocab-push", "tocab-push"}};
  for (auto [m, suffix] : names)
    if (mode == m) return parse_trace_kernel(kernel + "-" + suffix);
  throw usage_error("mode '" + mode + "' is not available for " + kernel);
}

int cmd_simulate(const SimulateArgs& a) {
  const auto modes = split(a.modes, ',');
  if (modes.empty()) throw usage_error("--modes must list at least one mode");
  std::vector<TraceKernel> kernels;
  for (const auto& m : modes) kernels.push_back(trace_kernel_for(a.kernel, m));

  std::vector<count_t> widths;
  if (!a.widths.empty()) widths = parse_widths(a.widths);
  else if (a.sweep) widths = parse_widths("2^8..2^18");
  else widths = {kDefaultBlockWidth};

  CacheConfig cfg{a.capacity, a.line, a.assoc, {}};
  for (const auto& cls : split(a.bypass, ',')) {
    auto c = parse_stream_class(cls);
    if (!c) throw usage_error("unknown stream class '" + cls + "'");
    cfg.bypass.set(static_cast<std::size_t>(*c));
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw usage_error(e.what());
  }

  std::string label;
  const CsrGraph g = load_graph(a.graph, label);
  if (a.kernel == "bc" && a.source >= g.num_vertices()) throw usage_error("source out of range");
  TraceOptions opt;
  opt.k = a.k;
  opt.iterations = a.iterations;
  opt.damping = a.damping;
  opt.index_streams = a.index_streams;
  opt.source = static_cast<vertex_id>(a.source);
  opt.policy.cache_capacity_bytes = a.capacity;
  auto rows = compare_modes(g, kernels, widths, cfg, opt);

  std::ofstream file;
  std::ostream& os = open_out(a.out, file);
  write_metrics_csv_header(os);
  for (const auto& r : rows) {
    std::string mode;
    for (std::size_t i = 0; i < kernels.size(); ++i)
      if (kernels[i] == r.kernel) mode = modes[i];
    write_metrics_csv_row(os, label, a.kernel, mode, r.width, a.k, r.metrics);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cache-blocked graph kernels: partition, run and simulate"};
  app.require_subcommand(1);

  PartitionArgs pa;
  auto* part = app.add_subcommand("partition", "build a blocked graph and print block statistics");
  add_graph_flags(part, pa.graph);
  part->add_option("--direction", pa.direction, "pull | push")->check(CLI::IsMember({"pull", "push"}));
  part->add_option("--scheme", pa.scheme, "tocab | cb")->check(CLI::IsMember({"tocab", "cb"}));
  part->add_option("--width", pa.width, "vertices per block (N or 2^k)");
  part->add_option("--out", pa.out, "GCB output file");

  RunArgs ra;
  auto* run = app.add_subcommand("run", "run a kernel and report a timing record");
  run->add_option("kernel", ra.kernel, "pr | spmv | bc | bfs")
      ->required()
      ->check(CLI::IsMember({"pr", "spmv", "bc", "bfs"}));
  add_graph_flags(run, ra.graph);
  add_exec_flags(run, ra.exec);
  run->add_option("--mode", ra.mode, "baseline-pull | baseline-push | cb | tocab-pull | tocab-push | hybrid");
  run->add_option("--width", ra.width, "vertices per block (N or 2^k)");
  run->add_option("--k", ra.k, "accumulation range width");
  run->add_option("--damping", ra.damping);
  run->add_option("--tol", ra.tol);
  run->add_option("--max-iters", ra.max_iters);
  run->add_option("--reps", ra.reps, "repetitions averaged into wall_time_ms");
  run->add_flag("--verify", ra.verify, "compare with the sequential baseline");
  run->add_option("--source", ra.source, "single traversal source");
  run->add_option("--sources", ra.sources, "number of sampled BC sources");
  run->add_option("--seed", ra.seed, "source sampling seed");
  run->add_option("--capacity", ra.cache_capacity, "cache bytes for the hybrid direction switch");
  run->add_option("--out", ra.out, "CSV output (default stdout)");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "simulate cache behaviour of traced kernels");
  add_graph_flags(sim, sa.graph);
  sim->add_option("--kernel", sa.kernel, "pr | spmv | bc");
  sim->add_option("--modes", sa.modes, "comma-separated modes")->required();
  sim->add_option("--widths", sa.widths, "comma list or 2^a..2^b");
  sim->add_flag("--sweep", sa.sweep, "sweep widths 2^8..2^18 unless --widths is given");
  sim->add_option("--width", sa.widths, "single width (N or 2^k)");
  sim->add_option("--k", sa.k);
  sim->add_option("--iterations", sa.iterations, "traced PR/SpMV iterations");
  sim->add_option("--damping", sa.damping);
  sim->add_option("--capacity", sa.capacity);
  sim->add_option("--line", sa.line);
  sim->add_option("--assoc", sa.assoc);
  sim->add_option("--bypass", sa.bypass, "stream classes that skip the cache");
  sim->add_flag("--index-streams", sa.index_streams, "also trace csr_index and edge_values");
  sim->add_option("--source", sa.source, "BC source");
  sim->add_option("--out", sa.out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*part) return cmd_partition(pa);
    if (*run) return cmd_run(ra);
    return cmd_simulate(sa);
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
