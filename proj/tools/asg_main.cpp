#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "asg/errors.hpp"
#include "asg/harness.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_gen_scene(const std::string& tmpl, std::uint64_t seed, const std::string& out) {
  asg::SceneTemplate t;
  if (tmpl == "apartment")
    t = asg::SceneTemplate::apartment;
  else if (tmpl == "furnished_room")
    t = asg::SceneTemplate::furnished_room;
  else
    throw asg::ConfigError("unknown template: " + tmpl + " (apartment|furnished_room)");
  const asg::SceneSpec scene = asg::generate_scene(t, seed);
  asg::save_scene(scene, out);
  std::cout << "wrote " << out << " (" << scene.objects.size() << " objects, "
            << scene.rooms.size() << " rooms)\n";
  return 0;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& planner, int steps, const std::string& out,
            const std::string& external_cams, const std::string& remote_url) {
  asg::ExperimentConfig cfg = asg::load_config(config_path);
  if (seed) cfg.experiment_seed = *seed;
  if (!planner.empty()) {
    const auto p = asg::planner_from_name(planner);
    if (!p) throw asg::ConfigError("unknown planner: " + planner);
    cfg.planner.planner = *p;
  }
  if (steps >= 0) cfg.steps = steps;
  if (!out.empty()) cfg.out_dir = out;
  if (!external_cams.empty()) {
    if (fs::exists(external_cams)) {
      std::ifstream in(external_cams);
      nlohmann::json j;
      in >> j;
      cfg.external_preset.clear();
      cfg.external_cameras.clear();
      for (const auto& jc : j) {
        asg::ExternalCameraSpec cam;
        cam.position = {jc.at("position")[0].get<double>(),
                        jc.at("position")[1].get<double>(),
                        jc.at("position")[2].get<double>()};
        cam.heading = jc.value("heading", 0.0);
        cam.pitch_down = jc.value("pitch_down", asg::kExternalCamPitch);
        cfg.external_cameras.push_back(cam);
      }
    } else {
      cfg.external_preset = external_cams;
      cfg.external_cameras.clear();
    }
  }
  if (!remote_url.empty()) cfg.remote_sampler = asg::RemoteSamplerConfig{remote_url, 30.0};
  cfg.validate();
  if (cfg.out_dir.empty()) throw asg::ConfigError("run: no output directory configured");

  for (int p = 0; p < cfg.num_start_poses; ++p) {
    std::string dir = cfg.out_dir;
    if (cfg.num_start_poses > 1) {
      char sub[32];
      std::snprintf(sub, sizeof(sub), "/pose%02d", p);
      dir += sub;
    }
    const asg::RunResult result = asg::run_experiment(cfg, p, dir);
    const asg::StepRecord& last = result.records.back();
    std::cout << "pose " << p << ": steps=" << last.step
              << " nodes=" << last.nodes_pred << " recall=" << last.recall
              << " f1=" << last.f1 << " -> " << dir << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& graph_path, const std::string& scene_path,
             std::uint64_t seed, int dim, double min_semantic, double max_dist) {
  std::ifstream in(graph_path);
  if (!in) throw asg::ConfigError("cannot open graph file: " + graph_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw asg::ConfigError("graph file " + graph_path + ": " + e.what());
  }
  const asg::SceneGraph graph = asg::graph_from_json(j, dim, seed);
  const asg::SceneSpec scene = asg::load_scene(scene_path);
  asg::MatchThresholds th;
  th.min_semantic = min_semantic;
  th.max_centroid_dist = max_dist;
  const auto matching = asg::match_nodes(graph, scene, th, seed, dim);
  const asg::Metrics m =
      asg::compute_metrics(matching.size(), graph.nodes.size(), scene.objects.size());
  std::printf("nodes_pred=%zu nodes_gt=%zu matched=%zu\n", graph.nodes.size(),
              scene.objects.size(), matching.size());
  std::printf("precision=%.6f recall=%.6f f1=%.6f\n", m.precision, m.recall, m.f1);
  return 0;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out) {
  std::vector<std::vector<asg::StepRecord>> runs;
  for (const std::string& dir : dirs) {
    if (!fs::exists(dir)) throw asg::ConfigError("report: no such path " + dir);
    if (fs::is_regular_file(dir)) {
      runs.push_back(asg::read_steps_csv(dir));
      continue;
    }
    std::vector<fs::path> found;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().filename() == "steps.csv")
        found.push_back(entry.path());
    std::sort(found.begin(), found.end());
    for (const fs::path& p : found) runs.push_back(asg::read_steps_csv(p.string()));
  }
  if (runs.empty()) throw asg::ConfigError("report: no steps.csv found");
  const std::string csv = asg::aggregate_csv(asg::aggregate_runs(runs));
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream o(out, std::ios::binary);
    o << csv;
    std::cout << "wrote " << out << " (" << runs.size() << " runs)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RGB-only active scene-graph construction simulator"};
  app.require_subcommand(1);

  // gen-scene
  std::string gs_template = "apartment";
  std::uint64_t gs_seed = 1;
  std::string gs_out = "scene.json";
  auto* gen = app.add_subcommand("gen-scene", "Generate a synthetic scene file");
  gen->add_option("template", gs_template, "apartment|furnished_room")->required();
  gen->add_option("seed", gs_seed, "generation seed")->required();
  gen->add_option("out", gs_out, "output scene JSON path")->required();

  // run
  std::string run_config;
  std::optional<std::uint64_t> run_seed;
  std::string run_planner, run_out, run_external, run_remote;
  int run_steps = -1;
  auto* run = app.add_subcommand("run", "Execute an experiment from a config file");
  run->add_option("--config", run_config, "experiment config JSON")->required();
  std::uint64_t seed_holder = 0;
  auto* seed_opt = run->add_option("--seed", seed_holder, "override experiment_seed");
  run->add_option("--planner", run_planner, "override planner (frontier|semantic|random)");
  run->add_option("--steps", run_steps, "override step count");
  run->add_option("--out", run_out, "override output directory");
  run->add_option("--external-cams", run_external,
                  "external camera preset name (overhead1..overhead3) or pose file");
  run->add_option("--remote-sampler", run_remote, "remote completion sampler URL");

  // eval
  std::string ev_graph, ev_scene;
  std::uint64_t ev_seed = 1;
  int ev_dim = asg::kDefaultEmbeddingDim;
  double ev_min_semantic = 0.85, ev_max_dist = 0.50;
  auto* ev = app.add_subcommand("eval", "Score a graph export against a scene file");
  ev->add_option("--graph", ev_graph, "graph_final.json path")->required();
  ev->add_option("--scene", ev_scene, "scene JSON path")->required();
  ev->add_option("--seed", ev_seed, "experiment seed used for embeddings");
  ev->add_option("--dim", ev_dim, "embedding dimension");
  ev->add_option("--min-semantic", ev_min_semantic, "cosine gate");
  ev->add_option("--max-centroid-dist", ev_max_dist, "localization gate (m)");

  // report
  std::vector<std::string> rp_dirs;
  std::string rp_out;
  auto* rp = app.add_subcommand("report", "Aggregate steps.csv files into mean/std curves");
  rp->add_option("dirs", rp_dirs, "run directories or steps.csv files")->required();
  rp->add_option("--out", rp_out, "output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
    if (seed_opt->count() > 0) run_seed = seed_holder;

    if (gen->parsed()) return cmd_gen_scene(gs_template, gs_seed, gs_out);
    if (run->parsed())
      return cmd_run(run_config, run_seed, run_planner, run_steps, run_out, run_external,
                     run_remote);
    if (ev->parsed())
      return cmd_eval(ev_graph, ev_scene, ev_seed, ev_dim, ev_min_semantic, ev_max_dist);
    if (rp->parsed()) return cmd_report(rp_dirs, rp_out);
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const asg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const asg::SceneError& e) {
    std::cerr << "scene error: " << e.what() << "\n";
    return 3;
  } catch (const asg::GenerationError& e) {
    std::cerr << "scene error: " << e.what() << "\n";
    return 3;
  } catch (const asg::SceneUnnavigableError& e) {
    std::cerr << "scene error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
