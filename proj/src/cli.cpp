#include "redbench/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "redbench/compare.hpp"
#include "redbench/dat_io.hpp"
#include "redbench/fluid_model.hpp"
#include "redbench/fokker_planck.hpp"
#include "redbench/metrics.hpp"
#include "redbench/packet_sim.hpp"
#include "redbench/traffic_gen.hpp"

namespace redbench {

namespace {

namespace fs = std::filesystem;

struct RedFlags {
  double q_min = 5.0;
  double q_max = 15.0;
  double p_max = 0.1;
  double w_q = 0.002;
  bool use_count = false;

  void add(CLI::App* app) {
    app->add_option("--qmin", q_min, "RED lower threshold (packets)")->capture_default_str();
    app->add_option("--qmax", q_max, "RED upper threshold (packets)")->capture_default_str();
    app->add_option("--pmax", p_max, "RED maximum drop probability")->capture_default_str();
    app->add_option("--wq", w_q, "EWMA weight")->capture_default_str();
    app->add_flag("--use-count", use_count, "count-adjusted RED drop probability");
  }
  RedParams params() const { return {q_min, q_max, p_max, w_q, use_count}; }
};

struct SimFlags {
  std::string script;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  double capacity = 10e6;
  double prop_delay = 0.01;
  std::size_t buffer = 100;
  std::string discipline = "red";
  RedFlags red;
  double rtt_base = 0.1;
  double init_window = 1.0;
  double t_end = 0.0;
  double trace_dt = 0.01;
  std::uint32_t header_bytes = 0;
};

struct DecodeFlags {
  std::string log;
  std::string out_dir = ".";
  double bitrate_ms = 0.0;
  double delay_ms = 0.0;
  double jitter_ms = 0.0;
};

struct FluidFlags {
  std::string mode = "det";
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  double rtt = 0.1;
  double capacity = 100.0;
  double buffer = 100.0;
  RedFlags red;
  bool noise = true;
  bool marking = true;
  bool poisson_marks = false;
  bool delay_coupled = false;
  double fixed_p = -1.0;
  double lambda = -1.0;
  double t_end = 10.0;
  double dt = 0.0;
  double sample_dt = 0.01;
  std::size_t n_traj = 1000;
  std::size_t keep_traj = 0;
  double w0 = 1.0;
  double q0 = 0.0;
  double qhat0 = 0.0;
  std::string fp_model = "window";
  std::string fp_drift = "inv-rtt";
  double fp_lo = 1.0;
  double fp_hi = 60.0;
  std::size_t fp_cells = 236;
  double fp_x0 = -1.0;
  double fp_dt = 0.0;
  double fp_w = 10.0;
  double heat_d = 2.0;
};

struct CompareFlags {
  std::vector<std::string> packet;
  std::string fluid;
  double warmup = 0.0;
  double grid_dt = 0.01;
  double max_lag = 0.0;
};

std::vector<std::string> ledger(const CLI::App* sub) {
  std::vector<std::string> lines{std::string("redbench ") + sub->get_name()};
  std::istringstream cfg(sub->config_to_str(true, false));
  for (std::string line; std::getline(cfg, line);) {
    if (line.empty() || line[0] == '[' || line.rfind("config", 0) == 0) continue;
    lines.push_back(line);
  }
  return lines;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
}

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  return os;
}

int cmd_sim(const SimFlags& f, const CLI::App* sub, std::ostream& out) {
  const auto flows = parse_flow_script(read_text(f.script));
  if (flows.empty()) throw std::runtime_error("flow script '" + f.script + "' defines no flows");

  LinkConfig link;
  link.capacity_bps = f.capacity;
  link.prop_delay = f.prop_delay;
  link.buffer = f.buffer;
  link.discipline = f.discipline == "red" ? Discipline::Red : Discipline::DropTail;
  link.red = f.red.params();
  link.header_bytes = f.header_bytes;

  SimOptions opt;
  opt.seed = f.seed;
  opt.tcp.rtt_base = f.rtt_base;
  opt.tcp.initial_window = f.init_window;
  opt.t_end = f.t_end;
  if (!(opt.t_end > 0.0)) {
    double longest = 0.0;
    for (const auto& fl : flows) longest = std::max(longest, fl.duration_s());
    opt.t_end = longest + 1.0;
  }

  const SimResult result = run_simulation(flows, link, opt);
  ensure_dir(f.out_dir);
  const auto header = ledger(sub);

  PacketLog log = to_packet_log(result, flows);
  log.comments = header;
  {
    auto os = open_out((fs::path(f.out_dir) / "recv.log").string());
    write_packet_log(os, log);
  }

  DatTable queue;
  queue.comments = header;
  queue.names = {"t", "Q", "Q_hat"};
  queue.columns.resize(3);
  const auto rows = f.trace_dt > 0.0 ? queue_timeseries(result.trace, f.trace_dt)
                                     : result.trace.samples;
  for (const auto& s : rows) {
    queue.columns[0].push_back(s.t);
    queue.columns[1].push_back(s.q);
    queue.columns[2].push_back(s.q_hat);
  }
  write_dat_file((fs::path(f.out_dir) / "queue.dat").string(), queue);

  if (!result.windows.empty()) {
    DatTable win;
    win.comments = header;
    win.names = {"t", "flow", "W"};
    win.columns.resize(3);
    for (const auto& w : result.windows) {
      win.columns[0].push_back(w.t);
      win.columns[1].push_back(w.flow);
      win.columns[2].push_back(w.w);
    }
    write_dat_file((fs::path(f.out_dir) / "window.dat").string(), win);
  }

  std::uint64_t sent = 0, dropped = 0, delivered = 0;
  for (const auto& c : result.counters) {
    sent += c.sent;
    dropped += c.dropped();
    delivered += c.delivered;
  }
  out << "flows=" << flows.size() << " sent=" << sent << " delivered=" << delivered
      << " dropped=" << dropped << " out=" << f.out_dir << '\n';
  return kExitOk;
}

int cmd_decode(const DecodeFlags& f, const CLI::App* sub, std::ostream& out) {
  std::ifstream is(f.log, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + f.log + "'");
  const PacketLog log = read_packet_log(is);

  const std::pair<double, SeriesMetric> requests[] = {{f.bitrate_ms, SeriesMetric::Bitrate},
                                                      {f.delay_ms, SeriesMetric::Delay},
                                                      {f.jitter_ms, SeriesMetric::Jitter}};
  bool any = false;
  for (const auto& [ms, metric] : requests) {
    if (ms <= 0.0) continue;
    if (!any) ensure_dir(f.out_dir);
    any = true;
    DatTable table = binned_series(log, ms, metric);
    auto header = ledger(sub);
    table.comments.insert(table.comments.begin(), header.begin(), header.end());
    const auto path = (fs::path(f.out_dir) / dat_file_name(metric)).string();
    write_dat_file(path, table);
    out << "wrote " << path << " (" << table.rows() << " rows)\n";
  }
  if (!any) {
    out << render_report(decode(log));
  }
  return kExitOk;
}

FluidParams fluid_params(const FluidFlags& f) {
  FluidParams p;
  p.rtt = f.rtt;
  p.capacity = f.capacity;
  p.buffer = f.buffer;
  p.w_q = f.red.w_q;
  p.red = f.red.params();
  p.noise_enabled = f.noise;
  p.marking_enabled = f.marking;
  p.marking_mode = f.poisson_marks ? MarkingMode::PoissonEvents : MarkingMode::ExpectedDrift;
  p.delay_coupled_rtt = f.delay_coupled;
  if (f.fixed_p >= 0.0) p.fixed_drop_probability = f.fixed_p;
  if (f.lambda >= 0.0) {
    const double lambda = f.lambda;
    p.intensity = [lambda](const FluidState&, const FluidParams&) { return lambda; };
  }
  return p;
}

DatTable trajectory_table(const std::vector<FluidState>& traj, std::vector<std::string> header) {
  DatTable t;
  t.comments = std::move(header);
  t.names = {"t", "W", "Q", "Q_hat"};
  t.columns.resize(4);
  for (const auto& s : traj) {
    t.columns[0].push_back(s.t);
    t.columns[1].push_back(s.w);
    t.columns[2].push_back(s.q);
    t.columns[3].push_back(s.q_hat);
  }
  return t;
}

int cmd_fluid_fp(const FluidFlags& f, const std::vector<std::string>& header, std::ostream& out) {
  const FluidParams params = fluid_params(f);
  params.validate();
  CoefficientPair coeffs;
  double lo = f.fp_lo, hi = f.fp_hi;
  double x0 = f.fp_x0;
  if (f.fp_model == "window") {
    const double lambda =
        f.lambda >= 0.0 ? f.lambda : marking_intensity(FluidState{f.fp_w, f.q0, f.qhat0, 0.0}, params);
    coeffs = window_coefficients(f.rtt, lambda,
                                 f.fp_drift == "inv-rtt" ? WindowDrift::ConstantRtt
                                                        : WindowDrift::InverseWindow);
    if (x0 < 0.0) x0 = f.w0;
  } else if (f.fp_model == "queue") {
    const double a = f.fp_w / f.rtt - f.capacity;
    coeffs = {[a](double) { return a; }, [a](double) { return std::abs(a); }};
    if (x0 < 0.0) x0 = f.q0;
  } else {
    const double d = f.heat_d;
    coeffs = {[](double) { return 0.0; }, [d](double) { return d; }};
    if (x0 < 0.0) x0 = 0.5 * (lo + hi);
  }
  Grid1D grid = Grid1D::uniform(lo, hi, f.fp_cells);
  grid.set_delta(x0);
  const double dt = f.fp_dt > 0.0 ? f.fp_dt : stable_fp_step(grid, coeffs.drift, coeffs.diffusion_sq);
  const FokkerPlanckResult r = solve_fokker_planck_1d(grid, coeffs.drift, coeffs.diffusion_sq, dt, f.t_end);

  DatTable t;
  t.comments = header;
  t.comments.push_back("fp_dt=" + format_number(dt) + " steps=" + std::to_string(r.steps) +
                       " clip_events=" + std::to_string(r.clip_events));
  t.comments.push_back("mass=" + format_number(r.grid.total_mass()) +
                       " mean=" + format_number(r.grid.mean()) +
                       " variance=" + format_number(r.grid.variance()) +
                       " initial_variance=" + format_number(grid.variance()));
  t.names = {"x", "density"};
  t.columns.resize(2);
  for (std::size_t i = 0; i < r.grid.n; ++i) {
    t.columns[0].push_back(r.grid.center(i));
    t.columns[1].push_back(r.grid.density[i]);
  }
  const auto path = (fs::path(f.out_dir) / "density.dat").string();
  write_dat_file(path, t);
  out << "wrote " << path << " mass=" << format_number(r.grid.total_mass())
      << " variance=" << format_number(r.grid.variance()) << " clip_events=" << r.clip_events
      << '\n';
  return kExitOk;
}

int cmd_fluid(const FluidFlags& f, const CLI::App* sub, std::ostream& out) {
  ensure_dir(f.out_dir);
  const auto header = ledger(sub);
  if (f.mode == "fp") return cmd_fluid_fp(f, header, out);

  FluidParams params = fluid_params(f);
  FluidRunConfig cfg;
  cfg.t_end = f.t_end;
  cfg.dt = f.dt;
  cfg.sample_dt = f.sample_dt;
  cfg.seed = f.seed;
  cfg.initial = FluidState{f.w0, f.q0, f.qhat0, 0.0};

  if (f.mode == "det") {
    params.noise_enabled = false;
    cfg.n_traj = 1;
    cfg.keep_trajectories = true;
    const FluidRun run = simulate_fluid(params, cfg);
    const auto path = (fs::path(f.out_dir) / "trajectory.dat").string();
    write_dat_file(path, trajectory_table(run.trajectories.front(), header));
    const FluidState& last = run.final_states.front();
    out << "wrote " << path << " W=" << format_number(last.w) << " Q=" << format_number(last.q)
        << " Q_hat=" << format_number(last.q_hat) << '\n';
    return kExitOk;
  }

  cfg.n_traj = f.n_traj;
  cfg.keep_trajectories = f.keep_traj > 0;
  const FluidRun run = simulate_fluid(params, cfg);
  DatTable ens;
  ens.comments = header;
  ens.names = {"t", "mean_W", "mean_Q", "mean_Q_hat", "var_W", "var_Q", "var_Q_hat"};
  const auto& s = run.stats;
  ens.columns = {s.t, s.mean_w, s.mean_q, s.mean_q_hat, s.var_w, s.var_q, s.var_q_hat};
  const auto path = (fs::path(f.out_dir) / "ensemble.dat").string();
  write_dat_file(path, ens);
  for (std::size_t i = 0; i < std::min(f.keep_traj, run.trajectories.size()); ++i) {
    auto h = header;
    h.push_back("trajectory " + std::to_string(i));
    write_dat_file((fs::path(f.out_dir) / ("trajectory_" + std::to_string(i) + ".dat")).string(),
                   trajectory_table(run.trajectories[i], h));
  }
  out << "wrote " << path << " n_traj=" << f.n_traj << " mean_Q(t_end)="
      << format_number(s.mean_q.back()) << '\n';
  return kExitOk;
}

int cmd_compare(const CompareFlags& f, std::ostream& out) {
  std::vector<DatTable> packet;
  for (const auto& p : f.packet) packet.push_back(read_dat_file(p));
  const DatTable fluid = read_dat_file(f.fluid);
  CompareOptions opt;
  opt.warmup = f.warmup;
  opt.grid_dt = f.grid_dt;
  opt.max_lag = f.max_lag;
  const CompareResult r = compare_queue_series(packet, fluid, opt);
  out << "packet runs         = " << r.packet_runs << '\n'
      << "window              = [" << format_number(r.t_start) << ", " << format_number(r.t_end)
      << "] s, " << r.points << " points\n"
      << "Q     rel L1 / Linf = " << format_number(r.q.rel_l1) << " / "
      << format_number(r.q.rel_linf) << '\n'
      << "Q     mean pkt/fluid = " << format_number(r.q.mean_packet) << " / "
      << format_number(r.q.mean_fluid) << '\n'
      << "Q_hat rel L1 / Linf = " << format_number(r.q_hat.rel_l1) << " / "
      << format_number(r.q_hat.rel_linf) << '\n'
      << "Q_hat mean pkt/fluid = " << format_number(r.q_hat.mean_packet) << " / "
      << format_number(r.q_hat.mean_fluid) << '\n'
      << "Q_hat lag pkt/fluid = " << format_number(r.lag_packet) << " / "
      << format_number(r.lag_fluid) << " s\n"
      << r.summary_line() << '\n';
  return kExitOk;
}

// key=value lines become "--key=value" ahead of the command-line flags.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty()) return args;
  std::ifstream is(path);
  if (!is) throw CLI::FileError::Missing(path);
  std::vector<std::string> injected;
  std::string line;
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#' || line[first] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CLI::ConversionError("config line without '=': " + line);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    injected.push_back("--" + key + "=" + value);
  }
  std::vector<std::string> out{args.front()};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"RED verification workbench: packet simulation, fluid model, traffic metrics",
               "redbench"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_path;

  SimFlags sim_f;
  auto* sim = app.add_subcommand("sim", "simulate a flow script through a bottleneck link");
  sim->add_option("script", sim_f.script, "flow script (one ITGSend-style flow per line)")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("-o,--out-dir", sim_f.out_dir, "output directory")->capture_default_str();
  sim->add_option("--seed", sim_f.seed, "random seed")->capture_default_str();
  sim->add_option("--capacity", sim_f.capacity, "link capacity (bit/s)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--prop-delay", sim_f.prop_delay, "one-way propagation delay (s)")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  sim->add_option("--buffer", sim_f.buffer, "buffer size (packets)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--discipline", sim_f.discipline, "queue discipline")
      ->check(CLI::IsMember({"red", "droptail"}))->capture_default_str();
  sim_f.red.add(sim);
  sim->add_option("--rtt-base", sim_f.rtt_base, "TCP base round-trip time (s)")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  sim->add_option("--init-window", sim_f.init_window, "TCP initial window (packets)")
      ->capture_default_str();
  sim->add_option("--t-end", sim_f.t_end, "simulated time (s); 0 = longest flow + 1 s")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  sim->add_option("--trace-dt", sim_f.trace_dt, "queue.dat sampling step (s); 0 = every event")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  sim->add_option("--header-bytes", sim_f.header_bytes, "per-packet overhead (bytes)")
      ->capture_default_str();
  sim->add_option("--config", config_path, "key=value configuration file");

  DecodeFlags dec_f;
  auto* dec = app.add_subcommand("decode", "decode a packet log into statistics or .dat series");
  dec->add_option("log", dec_f.log, "packet log")->required()->check(CLI::ExistingFile);
  dec->add_option("-b", dec_f.bitrate_ms, "write bitrate.dat with this bin (ms)")
      ->check(CLI::PositiveNumber);
  dec->add_option("-d", dec_f.delay_ms, "write delay.dat with this bin (ms)")
      ->check(CLI::PositiveNumber);
  dec->add_option("-j", dec_f.jitter_ms, "write jitter.dat with this bin (ms)")
      ->check(CLI::PositiveNumber);
  dec->add_option("-o,--out-dir", dec_f.out_dir, "output directory for .dat files")
      ->capture_default_str();
  dec->add_option("--config", config_path, "key=value configuration file");

  FluidFlags fl_f;
  auto* fl = app.add_subcommand("fluid", "integrate the fluid model (det, sde) or its Fokker-Planck equation (fp)");
  fl->add_option("--mode", fl_f.mode, "det | sde | fp")
      ->check(CLI::IsMember({"det", "sde", "fp"}))->capture_default_str();
  fl->add_option("-o,--out-dir", fl_f.out_dir, "output directory")->capture_default_str();
  fl->add_option("--seed", fl_f.seed, "random seed")->capture_default_str();
  fl->add_option("--rtt", fl_f.rtt, "round-trip time T (s)")->check(CLI::PositiveNumber)->capture_default_str();
  fl->add_option("--capacity", fl_f.capacity, "service intensity C (packets/s)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  fl->add_option("--buffer", fl_f.buffer, "buffer B (packets)")->check(CLI::PositiveNumber)->capture_default_str();
  fl_f.red.add(fl);
  fl->add_flag("--noise,!--no-noise", fl_f.noise, "Wiener noise terms (sde)");
  fl->add_flag("--marking,!--no-marking", fl_f.marking, "RED marking term");
  fl->add_flag("--poisson-marks", fl_f.poisson_marks, "sample marks as Poisson events");
  fl->add_flag("--delay-coupled", fl_f.delay_coupled, "T = rtt + Q/C");
  fl->add_option("--fixed-p", fl_f.fixed_p, "hold the drop probability constant (diagnostic)");
  fl->add_option("--lambda", fl_f.lambda, "frozen marking intensity (events/s)");
  fl->add_option("--t-end", fl_f.t_end, "end time (s)")->check(CLI::PositiveNumber)->capture_default_str();
  fl->add_option("--dt", fl_f.dt, "integration step (s); 0 = rtt/100")->capture_default_str();
  fl->add_option("--sample-dt", fl_f.sample_dt, "output sampling step (s); 0 = every step")
      ->capture_default_str();
  fl->add_option("--n-traj", fl_f.n_traj, "ensemble size (sde)")->check(CLI::PositiveNumber)->capture_default_str();
  fl->add_option("--keep-traj", fl_f.keep_traj, "write this many individual trajectories (sde)")
      ->capture_default_str();
  fl->add_option("--w0", fl_f.w0, "initial window")->capture_default_str();
  fl->add_option("--q0", fl_f.q0, "initial queue")->capture_default_str();
  fl->add_option("--qhat0", fl_f.qhat0, "initial average queue")->capture_default_str();
  fl->add_option("--fp-model", fl_f.fp_model, "window | queue | heat")
      ->check(CLI::IsMember({"window", "queue", "heat"}))->capture_default_str();
  fl->add_option("--fp-drift", fl_f.fp_drift, "window drift source term: 1/T (inv-rtt) or 1/W (inv-window)")
      ->check(CLI::IsMember({"inv-rtt", "inv-window"}))->capture_default_str();
  fl->add_option("--fp-lo", fl_f.fp_lo, "grid lower bound")->capture_default_str();
  fl->add_option("--fp-hi", fl_f.fp_hi, "grid upper bound")->capture_default_str();
  fl->add_option("--fp-cells", fl_f.fp_cells, "grid cells")->capture_default_str();
  fl->add_option("--fp-x0", fl_f.fp_x0, "initial point mass location (default w0/q0/centre)");
  fl->add_option("--fp-dt", fl_f.fp_dt, "time step (s); 0 = half the stability limit")->capture_default_str();
  fl->add_option("--fp-w", fl_f.fp_w, "frozen window for the queue model and default lambda")
      ->capture_default_str();
  fl->add_option("--heat-d", fl_f.heat_d, "diffusion coefficient of the heat check")->capture_default_str();
  fl->add_option("--config", config_path, "key=value configuration file");

  CompareFlags cmp_f;
  auto* cmp = app.add_subcommand("compare", "error norms between packet and fluid queue series");
  cmp->add_option("--packet", cmp_f.packet, "packet queue.dat (repeat to average seeds)")
      ->required()->check(CLI::ExistingFile)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  cmp->add_option("--fluid", cmp_f.fluid, "fluid trajectory.dat or ensemble.dat")
      ->required()->check(CLI::ExistingFile);
  cmp->add_option("--warmup", cmp_f.warmup, "seconds discarded at the start")->capture_default_str();
  cmp->add_option("--grid-dt", cmp_f.grid_dt, "common grid step (s)")->check(CLI::PositiveNumber)->capture_default_str();
  cmp->add_option("--max-lag", cmp_f.max_lag, "lag search window (s); 0 = automatic")->capture_default_str();
  cmp->add_option("--config", config_path, "key=value configuration file");

  try {
    std::vector<std::string> argv = expand_config(args);
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_sim(sim_f, sim, out);
    if (dec->parsed()) return cmd_decode(dec_f, dec, out);
    if (fl->parsed()) return cmd_fluid(fl_f, fl, out);
    if (cmp->parsed()) return cmd_compare(cmp_f, out);
  } catch (const std::exception& e) {
    err << "redbench: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace redbench
