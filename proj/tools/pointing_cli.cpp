#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "pointing/analysis/mean_shift.hpp"
#include "pointing/analysis/objective_eval.hpp"
#include "pointing/analysis/perceptual.hpp"
#include "pointing/common/error.hpp"
#include "pointing/dataset/clip_io.hpp"
#include "pointing/dataset/mirror.hpp"
#include "pointing/dataset/profiles.hpp"
#include "pointing/dataset/synthetic.hpp"
#include "pointing/deixis/samplers.hpp"
#include "pointing/learning/checkpoint.hpp"
#include "pointing/study/http_server.hpp"

using namespace pointing;

namespace {

motion::SkeletonModel resolve_skeleton(const std::string& name) {
  if (name == "toy_arm") return motion::toy_arm();
  if (name == "desk_humanoid") return motion::desk_humanoid();
  return motion::load_skeleton(name);
}

deixis::TargetPoint parse_point(const std::string& s) {
  std::stringstream in(s);
  std::string tok;
  std::vector<double> v;
  while (std::getline(in, tok, ',')) v.push_back(std::stod(tok));
  if (v.size() != 3) throw Error(ErrorCode::invalid_argument, "expected x,y,z but got '" + s + "'");
  return {v[0], v[1], v[2]};
}

std::vector<deixis::TargetPoint> parse_points(const std::string& s) {
  std::vector<deixis::TargetPoint> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ';'))
    if (!tok.empty()) out.push_back(parse_point(tok));
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  return out;
}

/// "id=checkpoint.json", "id=cluster:checkpoint.json" or "id=gtnn:library.txt".
std::unique_ptr<learning::PointingModel> load_model(const std::string& spec, const motion::SkeletonModel& skeleton,
                                                    std::string& id) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw Error(ErrorCode::invalid_argument, "model spec '" + spec + "' needs id=source");
  id = spec.substr(0, eq);
  std::string source = spec.substr(eq + 1);
  if (source.rfind("gtnn:", 0) == 0) {
    return std::make_unique<learning::GtnnModel>(dataset::load_library(source.substr(5), skeleton), id);
  }
  if (source.rfind("cluster:", 0) == 0) {
    return std::make_unique<learning::ClusterPolicyModel>(skeleton, learning::load_cluster_checkpoint(source.substr(8)),
                                                          id);
  }
  auto trained = learning::load_checkpoint(source);
  if (trained.skeleton_id != skeleton.id()) {
    throw Error(ErrorCode::schema, "checkpoint " + source + " was trained on '" + trained.skeleton_id + "'");
  }
  return std::make_unique<learning::PolicyModel>(skeleton, std::move(trained), id);
}

deixis::HalfCylinderRange library_range(const dataset::ClipLibrary& lib) {
  const auto targets = lib.targets();
  return deixis::fit_half_cylinder(targets, dataset::default_root_position());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pointing gesture learning and evaluation toolkit"};
  app.require_subcommand(1);

  std::string skeleton_name = "toy_arm";

  // make-demos
  auto* demos = app.add_subcommand("make-demos", "Write a synthetic demonstration library");
  std::string demo_targets = "0.45,1.45,0.9;0.05,1.6,0.85;0.7,1.25,0.75";
  std::string demo_out;
  bool demo_mirror = false;
  demos->add_option("--skeleton", skeleton_name, "toy_arm, desk_humanoid or a skeleton file");
  demos->add_option("--targets", demo_targets, "Targets as x,y,z;x,y,z;...");
  demos->add_option("--out", demo_out)->required();
  demos->add_flag("--mirror", demo_mirror, "Append mirrored copies");

  // train
  auto* train = app.add_subcommand("train", "Train a pointing policy (or one per cluster)");
  std::string train_lib, train_out, train_curve, train_variant = "plain";
  learning::TrainConfig tcfg;
  int clusters = 0;
  double cluster_bw = 0.0;
  train->add_option("--skeleton", skeleton_name);
  train->add_option("--library", train_lib)->required();
  train->add_option("--out", train_out)->required();
  train->add_option("--curve", train_curve, "Learning-curve CSV");
  train->add_option("--iterations", tcfg.iterations);
  train->add_option("--episodes", tcfg.episodes_per_iteration);
  train->add_option("--w-imitation", tcfg.weights.imitation);
  train->add_option("--w-task", tcfg.weights.task);
  train->add_option("--variant", train_variant, "plain | pfnn");
  train->add_option("--seed", tcfg.seed);
  train->add_option("--clusters", clusters, "Train cluster policies with mean shift (0 = single policy)");
  train->add_option("--bandwidth", cluster_bw, "Mean-shift bandwidth (default: pooled Scott)");

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a pointing motion with a model");
  std::string gen_model, gen_target, gen_out;
  double gen_duration = 3.5;
  gen->add_option("--skeleton", skeleton_name);
  gen->add_option("--model", gen_model, "id=checkpoint | id=cluster:checkpoint | id=gtnn:library")->required();
  gen->add_option("--target", gen_target, "x,y,z")->required();
  gen->add_option("--duration", gen_duration);
  gen->add_option("--out", gen_out)->required();

  // sample-targets
  auto* sample = app.add_subcommand("sample-targets", "Sample test targets with distractors, or an evaluation grid");
  std::string sample_lib, sample_out;
  int sample_n = 100;
  std::uint64_t sample_seed = 0;
  bool sample_grid = false;
  sample->add_option("--skeleton", skeleton_name);
  sample->add_option("--library", sample_lib, "Library whose targets define the range")->required();
  sample->add_option("--n", sample_n);
  sample->add_option("--seed", sample_seed);
  sample->add_flag("--grid", sample_grid, "Spherical grid over the target bounding box");
  sample->add_option("--out", sample_out)->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Objective grid evaluation with density correlation");
  std::string eval_lib, eval_out, eval_summary;
  std::vector<std::string> eval_models;
  int eval_grid = 1000, eval_threads = 1;
  double eval_duration = 3.5;
  eval->add_option("--skeleton", skeleton_name);
  eval->add_option("--library", eval_lib, "Training library (density and grid limits)")->required();
  eval->add_option("--model", eval_models, "id=source, repeatable")->required();
  eval->add_option("--grid", eval_grid);
  eval->add_option("--threads", eval_threads);
  eval->add_option("--duration", eval_duration);
  eval->add_option("--out", eval_out)->required();
  eval->add_option("--summary", eval_summary);

  // profile
  auto* prof = app.add_subcommand("profile", "Averaged accuracy or velocity profile of a library");
  std::string prof_lib, prof_out, prof_kind = "accuracy";
  int prof_steps = dataset::kProfileSteps;
  prof->add_option("--skeleton", skeleton_name);
  prof->add_option("--library", prof_lib)->required();
  prof->add_option("--kind", prof_kind, "accuracy | velocity");
  prof->add_option("--steps", prof_steps);
  prof->add_option("--out", prof_out)->required();

  // stats
  auto* stats = app.add_subcommand("stats", "Perceptual statistics from a study export");
  std::string stats_in, stats_out;
  double stats_alpha = 0.01;
  stats->add_option("--export", stats_in)->required();
  stats->add_option("--alpha", stats_alpha);
  stats->add_option("--out", stats_out);

  // serve-study
  auto* serve = app.add_subcommand("serve-study", "Serve the perceptual study");
  std::string serve_config, serve_store = "study_store.jsonl", serve_host = "0.0.0.0";
  std::vector<std::string> serve_sources;
  int serve_port = 8080;
  serve->add_option("--config", serve_config)->required();
  serve->add_option("--port", serve_port)->required();
  serve->add_option("--host", serve_host);
  serve->add_option("--store", serve_store);
  serve->add_option("--source", serve_sources, "Model motion source id=..., repeatable");
  serve->add_option("--skeleton", skeleton_name);

  // export
  auto* exp = app.add_subcommand("export", "Export study responses as CSV");
  std::string exp_config, exp_store = "study_store.jsonl", exp_out;
  exp->add_option("--config", exp_config)->required();
  exp->add_option("--store", exp_store);
  exp->add_option("--out", exp_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto skeleton = resolve_skeleton(skeleton_name);

    if (*demos) {
      const auto targets = parse_points(demo_targets);
      auto lib = dataset::synthetic_library(skeleton, targets);
      if (demo_mirror) lib = dataset::with_mirrored(lib);
      dataset::save_library(demo_out, lib);
      std::cout << "wrote " << lib.size() << " clips to " << demo_out << "\n";
    } else if (*train) {
      tcfg.variant = learning::discriminator_variant_from_string(train_variant);
      const auto lib = dataset::load_library(train_lib, skeleton);
      const auto progress = [&](const learning::CurvePoint& p) {
        if (p.iteration % 10 == 0) {
          std::cerr << "iter " << p.iteration << " rG " << p.mean_task_reward << " rI " << p.mean_imitation_reward
                    << "\n";
        }
      };
      if (clusters > 0) {
        const auto targets = lib.targets();
        const double bw = cluster_bw > 0.0 ? cluster_bw : analysis::scott_bandwidth_pooled(targets);
        const auto model = analysis::mean_shift_cluster(targets, bw);
        std::cerr << "mean shift found " << model.cluster_count() << " clusters (bandwidth " << bw << ")\n";
        const auto set = learning::train_cluster_policies(lib, model.assignment, model.cluster_count(), tcfg, progress);
        learning::save_cluster_checkpoint(train_out, set);
      } else {
        const auto trained = learning::train_policy(skeleton, lib.clips, tcfg, progress);
        learning::save_checkpoint(train_out, trained);
        if (!train_curve.empty()) {
          auto out = open_out(train_curve);
          learning::write_curve_csv(out, trained.curve);
        }
      }
    } else if (*gen) {
      std::string id;
      const auto model = load_model(gen_model, skeleton, id);
      auto clip = learning::generate_motion(*model, parse_point(gen_target), gen_duration);
      dataset::save_library(gen_out, dataset::ClipLibrary{skeleton, {std::move(clip)}});
    } else if (*sample) {
      const auto lib = dataset::load_library(sample_lib, skeleton);
      std::vector<deixis::LabeledTarget> rows;
      if (sample_grid) {
        const auto targets = lib.targets();
        const auto grid = deixis::spherical_grid(deixis::bounding_box(targets), sample_n);
        for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back({static_cast<int>(i), grid[i], "grid"});
      } else {
        const auto range = library_range(lib);
        const auto targets = deixis::sample_test_targets(range, sample_n, sample_seed);
        Rng rng(mix_seed(sample_seed, 1));
        int id = 0;
        for (const auto& t : targets) {
          rows.push_back({id++, t, "target"});
          for (const auto& d : deixis::sample_distractors(t, range, rng)) rows.push_back({id++, d, "distractor"});
        }
      }
      auto out = open_out(sample_out);
      deixis::write_targets_csv(out, rows);
    } else if (*eval) {
      const auto lib = dataset::load_library(eval_lib, skeleton);
      const auto targets = lib.targets();
      const auto kde = analysis::fit_kde(targets);
      const auto grid = deixis::spherical_grid(deixis::bounding_box(targets), eval_grid);
      std::vector<std::unique_ptr<learning::PointingModel>> owned;
      std::vector<const learning::PointingModel*> models;
      for (const auto& spec : eval_models) {
        std::string id;
        owned.push_back(load_model(spec, skeleton, id));
        models.push_back(owned.back().get());
      }
      analysis::EvalConfig ecfg;
      ecfg.duration = eval_duration;
      ecfg.threads = eval_threads;
      const auto report = analysis::objective_eval(models, skeleton, grid, kde, ecfg);
      auto out = open_out(eval_out);
      analysis::write_eval_csv(out, report);
      if (!eval_summary.empty()) {
        auto sum = open_out(eval_summary);
        analysis::write_eval_summary(sum, report);
      } else {
        analysis::write_eval_summary(std::cout, report);
      }
    } else if (*prof) {
      const auto lib = dataset::load_library(prof_lib, skeleton);
      dataset::ProfileKind kind;
      if (prof_kind == "accuracy") {
        kind = dataset::ProfileKind::accuracy;
      } else if (prof_kind == "velocity") {
        kind = dataset::ProfileKind::velocity;
      } else {
        throw Error(ErrorCode::invalid_argument, "unknown profile kind '" + prof_kind + "'");
      }
      const auto profile = dataset::motion_profiles(lib.clips, skeleton, kind, prof_steps);
      auto out = open_out(prof_out);
      dataset::write_profile_csv(out, profile);
    } else if (*stats) {
      std::ifstream in(stats_in);
      if (!in) throw Error(ErrorCode::io, "cannot open " + stats_in);
      const auto records = analysis::read_export_csv(in);
      const auto report = analysis::perceptual_stats(records, stats_alpha);
      if (stats_out.empty()) {
        analysis::write_perceptual_report(std::cout, report);
      } else {
        auto out = open_out(stats_out);
        analysis::write_perceptual_report(out, report);
      }
    } else if (*serve) {
      auto cfg = study::load_study_config(serve_config);
      std::optional<study::ClipSource> source;
      if (!serve_sources.empty()) {
        auto models = std::make_shared<std::map<std::string, std::shared_ptr<learning::PointingModel>>>();
        for (const auto& spec : serve_sources) {
          std::string id;
          auto m = load_model(spec, skeleton, id);
          (*models)[id] = std::move(m);
        }
        for (const auto& m : cfg.models) {
          if (!models->count(m)) throw Error(ErrorCode::invalid_argument, "no --source for study model '" + m + "'");
        }
        source = study::ClipSource{skeleton, [models](const std::string& model, const deixis::TargetPoint& target,
                                                      double duration) {
                                     return learning::generate_motion(*models->at(model), target, duration);
                                   }};
      }
      study::StudyService service(std::move(cfg), serve_store, std::move(source));
      std::cerr << "serving study on " << serve_host << ":" << serve_port << " (store " << serve_store << ")\n";
      study::serve_study(service, serve_host, serve_port);
    } else if (*exp) {
      const auto cfg = study::load_study_config(exp_config);
      const auto records = study::export_store(cfg, exp_store);
      auto out = open_out(exp_out);
      analysis::write_export_csv(out, records);
      std::cout << "wrote " << records.size() << " records to " << exp_out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
