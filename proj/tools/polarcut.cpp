// polarcut command line: segment, eval, phantom, report, serve.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polarcut/api.hpp"
#include "polarcut/error.hpp"
#include "polarcut/metrics.hpp"
#include "polarcut/phantom.hpp"
#include "polarcut/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace polarcut;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitInternal = 1;

int report_error(const std::string& kind, const std::string& message) {
  std::cout << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << std::endl;
  return kind == errc::internal ? kExitInternal : kExitInput;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(errc::bad_config, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io, "cannot write " + path.string());
  out << text;
}

int cmd_segment(const fs::path& config_path, bool voxel_coords) {
  JobConfig cfg = job_config_from_json(read_json(config_path), config_path.parent_path());
  const Volume volume = cfg.format ? load_volume(cfg.volume, *cfg.format) : load_volume(cfg.volume);
  if (voxel_coords || cfg.voxel_coords) seeds_to_world(cfg.request.seeds, volume);

  const SegmentationResult result = segment(volume, cfg.request);
  json stats = stats_json(result);
  if (cfg.reference) {
    const BinaryMask ref = load_mask(*cfg.reference);
    stats["dsc"] = dsc(result.mask, ref);
  }

  if (cfg.mask_out) save_mask_native(result.mask, *cfg.mask_out);
  if (cfg.mesh_out) {
    std::ostringstream obj;
    write_obj(result.mesh, obj);
    write_text(*cfg.mesh_out, obj.str());
  }
  if (cfg.contours_out) write_text(*cfg.contours_out, contours_json(result, volume).dump() + "\n");
  if (cfg.dimacs_out) {
    std::ostringstream dimacs;
    write_dimacs(rebuild_graph(result, cfg.request.params).net, dimacs);
    write_text(*cfg.dimacs_out, dimacs.str());
  }
  if (cfg.stats_out) write_text(*cfg.stats_out, stats.dump(2) + "\n");
  std::cout << stats.dump(2) << std::endl;
  return 0;
}

int cmd_eval(const fs::path& a_path, const fs::path& r_path, const std::string& semi_path,
             const std::string& csv_path, const std::string& case_id) {
  const BinaryMask a = load_mask(a_path);
  const BinaryMask r = load_mask(r_path);
  const double score = dsc(a, r);
  char line[64];
  std::snprintf(line, sizeof line, "DSC %.6f", score);
  std::cout << line << '\n'
            << "volume_a_cm3 " << volume_cm3(a) << '\n'
            << "volume_r_cm3 " << volume_cm3(r) << '\n'
            << "voxels_a " << a.count() << '\n'
            << "voxels_r " << r.count() << std::endl;

  if (!csv_path.empty()) {
    CaseStats c;
    c.id = case_id.empty() ? a_path.stem().string() : case_id;
    c.spacing = r.spacing();
    c.vox_manual = r.count();
    c.vox_oneclick = a.count();
    c.dsc_oneclick = score;
    if (!semi_path.empty()) {
      const BinaryMask s = load_mask(semi_path);
      c.vox_semi = s.count();
      c.dsc_semi = dsc(s, r);
    } else {
      c.vox_semi = c.vox_oneclick;
      c.dsc_semi = c.dsc_oneclick;
    }
    const bool fresh = !fs::exists(csv_path) || fs::file_size(csv_path) == 0;
    std::ofstream out(csv_path, std::ios::app);
    if (!out) throw Error(errc::io, "cannot write " + csv_path);
    if (fresh) out << case_csv_header() << '\n';
    out << case_csv_row(c) << '\n';
  }
  return 0;
}

int cmd_phantom(const fs::path& spec_path, const std::string& prefix) {
  const PhantomSpec spec = phantom_spec_from_json(read_json(spec_path));
  const Phantom p = generate_phantom(spec);
  save_volume_native(p.volume, prefix + ".vol");
  save_mask_native(p.mask, prefix + ".mask");
  std::cout << json{{"volume", prefix + ".vol"},
                    {"mask", prefix + ".mask"},
                    {"mask_voxels", p.mask.count()}}
                   .dump()
            << std::endl;
  return 0;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

int cmd_report(const fs::path& csv_path, bool as_csv) {
  std::ifstream in(csv_path);
  if (!in) throw Error(errc::io, "cannot open " + csv_path.string());
  std::string line;
  std::getline(in, line);
  if (line != case_csv_header()) throw Error(errc::bad_config, "unexpected CSV header");
  std::vector<CaseStats> cases;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != case_csv_columns().size()) throw Error(errc::bad_config, "bad CSV row: " + line);
    CaseStats c;
    c.id = cells[0];
    c.vox_manual = std::stoull(cells[4]);
    c.vox_oneclick = std::stoull(cells[5]);
    c.vox_semi = std::stoull(cells[6]);
    c.dsc_oneclick = std::stod(cells[7]);
    c.dsc_semi = std::stod(cells[8]);
    // Rows carry voxel volume only implicitly (volume / count).
    const double vol = std::stod(cells[1]);
    const double side = c.vox_manual > 0 ? std::cbrt(vol * 1000.0 / static_cast<double>(c.vox_manual)) : 1.0;
    c.spacing = {side, side, side};
    cases.push_back(c);
  }
  const Report rep = summarize(cases);
  std::cout << (as_csv ? rep.to_csv() : rep.to_text());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded spherical-graph min-cut segmentation"};
  app.require_subcommand(1);

  std::string config;
  bool voxel_coords = false;
  auto* seg = app.add_subcommand("segment", "Segment a volume from a job config");
  seg->add_option("--config", config, "Job config JSON")->required();
  seg->add_flag("--voxel-coords", voxel_coords, "Seeds are voxel indices, not millimetres");

  std::string mask_a, mask_r, mask_semi, csv, case_id;
  auto* ev = app.add_subcommand("eval", "Compare a mask against a reference");
  ev->add_option("--a", mask_a, "Automatic (one-click) mask")->required();
  ev->add_option("--r", mask_r, "Reference mask")->required();
  ev->add_option("--semi", mask_semi, "Semi-automatic mask for the CSV row");
  ev->add_option("--csv", csv, "Append a case row to this CSV");
  ev->add_option("--case", case_id, "Case id for the CSV row");

  std::string spec, prefix;
  auto* ph = app.add_subcommand("phantom", "Generate a synthetic volume and its ground truth");
  ph->add_option("--spec", spec, "Phantom spec JSON")->required();
  ph->add_option("--out", prefix, "Output prefix")->required();

  std::string report_csv;
  bool report_as_csv = false;
  auto* rp = app.add_subcommand("report", "Summarize a case CSV (min, max, mean, std-dev)");
  rp->add_option("--csv", report_csv, "Case CSV written by eval")->required();
  rp->add_flag("--as-csv", report_as_csv, "Emit CSV instead of an aligned table");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* sv = app.add_subcommand("serve", "Run the HTTP service for the slice viewer");
  sv->add_option("--host", host, "Bind address");
  sv->add_option("--port", port, "Port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*seg) return cmd_segment(config, voxel_coords);
    if (*ev) return cmd_eval(mask_a, mask_r, mask_semi, csv, case_id);
    if (*ph) return cmd_phantom(spec, prefix);
    if (*rp) return cmd_report(report_csv, report_as_csv);
    if (*sv) return api::serve(host, port);
  } catch (const Error& e) {
    return report_error(e.kind(), e.what());
  } catch (const std::exception& e) {
    return report_error(errc::internal, e.what());
  }
  return 0;
}
