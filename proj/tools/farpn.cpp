// farpn: anchors | synth | propose | eval | bench
//
// Every subcommand takes --config (JSON) plus --set key=value overrides and
// writes its outputs, along with the fully resolved config, into --out.
// Stages exchange data only through files: FARP tensors, annotation text,
// and CSV.
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>

#include "farpn/config.hpp"
#include "farpn/evalrec.hpp"
#include "farpn/nms.hpp"
#include "farpn/refine.hpp"
#include "farpn/synth.hpp"
#include "farpn/tensor.hpp"

namespace fs = std::filesystem;
using namespace farpn;
using Clock = std::chrono::steady_clock;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  int workers = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON run configuration");
  cmd->add_option("--set", args.overrides, "key=value override, repeatable");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--workers", args.workers,
                  "worker threads, 0 = available parallelism");
}

RunConfig resolve(const CommonArgs& args) {
  RunConfig rc;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw std::runtime_error("cannot open config: " + args.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    rc = config_from_json(ss.str());
  }
  for (const std::string& kv : args.overrides) apply_override(rc, kv);
  if (args.workers > 0) rc.workers = args.workers;
  omp_set_num_threads(rc.workers > 0 ? rc.workers
                                     : omp_get_num_procs());
  return rc;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Every run leaves a self-describing output directory.
void echo_config(const RunConfig& rc, const CommonArgs& args) {
  fs::create_directories(args.out_dir);
  write_text(fs::path(args.out_dir) / "config.json", config_to_json(rc));
}

std::string image_tag(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", i);
  return buf;
}

SceneConfig scene_config(const RunConfig& rc, int image_index) {
  SceneConfig sc;
  sc.seed = rc.seed + static_cast<std::uint64_t>(image_index);
  sc.image_width = rc.anchor.image_width;
  sc.image_height = rc.anchor.image_height;
  sc.min_side = rc.side_min;
  sc.max_side = rc.side_max;
  sc.iou_ceiling = rc.iou_ceiling;
  sc.margin = rc.scene_margin;
  std::mt19937_64 rng(sc.seed);
  std::uniform_int_distribution<int> boxes(rc.n_boxes_min, rc.n_boxes_max);
  sc.n_boxes = boxes(rng);
  return sc;
}

int cmd_anchors(const CommonArgs& args, bool dense) {
  const RunConfig rc = resolve(args);
  echo_config(rc, args);
  const AnchorSet strided = place(rc.anchor);
  const AnchorSet densified = place_dense(rc.anchor, rc.anchor.min_stride);
  const AnchorSet& emitted = dense ? densified : strided;
  write_text(fs::path(args.out_dir) / "anchors.csv", anchors_to_csv(emitted));
  const double ratio =
      strided.size() == 0
          ? 0.0
          : static_cast<double>(densified.size()) / strided.size();
  std::printf("strided=%zu dense=%zu ratio=%.2f\n", strided.size(),
              densified.size(), ratio);
  return 0;
}

int cmd_synth(const CommonArgs& args) {
  const RunConfig rc = resolve(args);
  echo_config(rc, args);
  Dataset ds;
  for (int i = 0; i < rc.n_images; ++i) {
    const Scene scene = synth_scene(scene_config(rc, i));
    const auto [score, regress] =
        synth_features(scene, rc.feature_stride, rc.pool, rc.noise_sd);
    const std::string tag = image_tag(i);
    write_tensor(score, (fs::path(args.out_dir) / ("score_" + tag + ".farp"))
                            .string());
    write_tensor(regress,
                 (fs::path(args.out_dir) / ("regress_" + tag + ".farp"))
                     .string());
    ds.entries.push_back(DatasetEntry{"scene_" + tag, scene.image_width,
                                      scene.image_height, scene.gts});
  }
  write_text(fs::path(args.out_dir) / "annotations.txt",
             format_annotations(ds));
  std::printf("images=%d gts=%zu\n", rc.n_images, ds.total_gts());
  return 0;
}

int cmd_propose(const CommonArgs& args, const std::string& in_dir,
                bool use_dense_anchors) {
  const RunConfig rc = resolve(args);
  echo_config(rc, args);
  std::vector<fs::path> scores;
  for (const auto& e : fs::directory_iterator(in_dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("score_", 0) == 0 && e.path().extension() == ".farp")
      scores.push_back(e.path());
  }
  std::sort(scores.begin(), scores.end());
  if (scores.empty())
    throw std::runtime_error("no score_*.farp tensors in " + in_dir);

  const AnchorSet anchors =
      use_dense_anchors ? place_dense(rc.anchor, rc.feature_stride)
                        : place(rc.anchor);
  std::vector<std::string> outputs(scores.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(scores.size()); ++i) {
    fs::path rpath = scores[i];
    rpath.replace_filename("regress_" +
                           scores[i].filename().string().substr(6));
    const FeatureMap score = read_tensor(scores[i].string());
    const FeatureMap regress = read_tensor(rpath.string());
    auto props =
        propose_from_anchors(score, regress, anchors, rc.refine, rc.pool,
                             rc.anchor.image_width, rc.anchor.image_height);
    outputs[i] = proposals_to_csv(run_nms(std::move(props), rc.nms));
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const std::string stem = scores[i].stem().string().substr(6);
    write_text(fs::path(args.out_dir) / ("proposals_" + stem + ".csv"),
               outputs[i]);
  }
  std::printf("images=%zu anchors=%zu\n", scores.size(), anchors.size());
  return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& proposals_dir,
             const std::string& annotations_path, std::vector<int> top_ns,
             std::vector<double> ious) {
  const RunConfig rc = resolve(args);
  echo_config(rc, args);
  const Dataset ds = parse_annotations(read_text(annotations_path));
  std::vector<std::vector<Proposal>> per_image;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(proposals_dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("proposals_", 0) == 0 && e.path().extension() == ".csv")
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files)
    per_image.push_back(proposals_from_csv(read_text(f)));

  if (top_ns.empty()) top_ns = {100, 1000};
  if (ious.empty()) ious = {0.5};
  const RecallReport report = recall_at(per_image, ds, ious, top_ns);
  write_text(fs::path(args.out_dir) / "report.csv", emit_report_csv(report));
  write_text(fs::path(args.out_dir) / "report.json",
             emit_report_json(report));
  for (const RecallCell& c : report.cells)
    std::printf("top_n=%d iou=%.2f recall=%.4f\n", c.top_n, c.iou_thresh,
                c.recall);
  return 0;
}

double median_seconds(const FeatureMap& score, const FeatureMap& regress,
                      const std::vector<Box>& rois, const PoolConfig& cfg) {
  std::vector<double> times;
  for (int r = 0; r < 5; ++r) {
    const auto t0 = Clock::now();
    batch_pool(score, regress, rois, cfg);
    times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[2];
}

int cmd_bench(const CommonArgs& args) {
  const RunConfig rc = resolve(args);
  echo_config(rc, args);
  PoolConfig c2 = rc.pool;
  PoolConfig c4 = rc.pool;
  c4.classes = 2 * c2.classes;
  std::mt19937_64 rng(rc.seed + 7);
  std::uniform_real_distribution<double> pos(0.0, 800.0), len(16.0, 200.0),
      val(-2.0, 2.0);
  auto rand_map = [&](int channels) {
    FeatureMap m = FeatureMap::zeros(64, 64, channels, rc.feature_stride);
    for (double& v : m.data) v = val(rng);
    return m;
  };
  const FeatureMap score2 = rand_map(c2.score_channels());
  const FeatureMap score4 = rand_map(c4.score_channels());
  const FeatureMap regress = rand_map(c2.regress_channels());
  auto make_rois = [&](int n) {
    std::vector<Box> rois;
    for (int i = 0; i < n; ++i) {
      const double x = pos(rng), y = pos(rng);
      rois.push_back({x, y, x + len(rng), y + len(rng)});
    }
    return rois;
  };
  const int n = 25000;
  const double t_n = median_seconds(score2, regress, make_rois(n), c2);
  const double t_2n = median_seconds(score2, regress, make_rois(2 * n), c2);
  const double t_2c = median_seconds(score4, regress, make_rois(n), c4);
  std::ostringstream csv;
  csv << "setting,rois,classes,median_seconds\n"
      << "baseline," << n << ',' << c2.classes << ',' << t_n << '\n'
      << "double_rois," << 2 * n << ',' << c2.classes << ',' << t_2n << '\n'
      << "double_classes," << n << ',' << c4.classes << ',' << t_2c << '\n';
  write_text(fs::path(args.out_dir) / "bench.csv", csv.str());
  std::printf("rois=%d t=%.3fs\n", n, t_n);
  std::printf("rois=%d t=%.3fs ratio_2n=%.2f\n", 2 * n, t_2n, t_2n / t_n);
  std::printf("classes=%d t=%.3fs ratio_2c=%.2f\n", c4.classes, t_2c,
              t_2c / t_n);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"floating-anchor region proposal toolkit"};
  app.require_subcommand(1);

  CommonArgs anchors_args, synth_args, propose_args, eval_args, bench_args;
  bool anchors_dense = false;
  std::string propose_in, eval_proposals, eval_annotations;
  bool propose_dense = false;
  std::vector<int> eval_topn;
  std::vector<double> eval_iou;

  CLI::App* anchors = app.add_subcommand("anchors", "place anchors, report counts");
  add_common(anchors, anchors_args);
  anchors->add_flag("--dense", anchors_dense,
                    "emit the uniform-stride set instead of the strided one");

  CLI::App* synth = app.add_subcommand("synth", "generate oracle scenes + tensors");
  add_common(synth, synth_args);

  CLI::App* propose = app.add_subcommand("propose", "score, refine, rank proposals");
  add_common(propose, propose_args);
  propose->add_option("--in", propose_in, "directory with score/regress tensors")
      ->required();
  propose->add_flag("--dense", propose_dense,
                    "place anchors at the uniform feature stride");

  CLI::App* eval = app.add_subcommand("eval", "proposal recall report");
  add_common(eval, eval_args);
  eval->add_option("--proposals", eval_proposals, "directory with proposals_*.csv")
      ->required();
  eval->add_option("--annotations", eval_annotations, "annotation text file")
      ->required();
  eval->add_option("--topn", eval_topn, "top-N cutoffs");
  eval->add_option("--iou", eval_iou, "IoU thresholds");

  CLI::App* bench = app.add_subcommand("bench", "pooling cost table");
  add_common(bench, bench_args);

  CLI11_PARSE(app, argc, argv);
  try {
    if (anchors->parsed()) return cmd_anchors(anchors_args, anchors_dense);
    if (synth->parsed()) return cmd_synth(synth_args);
    if (propose->parsed())
      return cmd_propose(propose_args, propose_in, propose_dense);
    if (eval->parsed())
      return cmd_eval(eval_args, eval_proposals, eval_annotations, eval_topn,
                      eval_iou);
    if (bench->parsed()) return cmd_bench(bench_args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
