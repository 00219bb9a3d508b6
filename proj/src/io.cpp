#include "coplaynet/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace coplaynet::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write: " + path);
  out << content;
  if (!out) throw DataError("write failed: " + path);
}

std::uint64_t fnv1a64_file(const std::string& path) {
  const std::string content = read_file(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : content) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// --- match logs -----------------------------------------------------------

namespace {

const char* team_name(Team t) { return t == Team::a ? "A" : "B"; }

}  // namespace

void write_matches_jsonl(const std::string& path,
                         const std::vector<MatchRecord>& matches) {
  std::ostringstream out;
  for (const auto& m : matches) {
    json j;
    j["match_id"] = m.match_id;
    j["start_time"] = m.start_time;
    j["duration"] = m.duration;
    if (m.team_a_win)
      j["radiant_win"] = *m.team_a_win;
    else
      j["radiant_win"] = nullptr;
    json players = json::array();
    for (const auto& slot : m.players) {
      players.push_back({{"account_id", slot.account_id},
                         {"team", team_name(slot.team)},
                         {"leaver_status", slot.leaver_status}});
    }
    j["players"] = std::move(players);
    out << j.dump() << "\n";
  }
  write_file(path, out.str());
}

void write_matches_csv(const std::string& path,
                       const std::vector<MatchRecord>& matches) {
  std::ostringstream out;
  out << "match_id,start_time,duration,radiant_win,account_id,team,"
         "leaver_status\n";
  for (const auto& m : matches) {
    const std::string win =
        m.team_a_win ? (*m.team_a_win ? "true" : "false") : "null";
    for (const auto& slot : m.players) {
      out << m.match_id << ',' << m.start_time << ',' << m.duration << ','
          << win << ',' << slot.account_id << ',' << team_name(slot.team)
          << ',' << slot.leaver_status << "\n";
    }
  }
  write_file(path, out.str());
}

// --- ingest artifacts ------------------------------------------------------

void write_rejects_csv(const std::string& path,
                       const std::vector<ingest::Reject>& rejects) {
  std::ostringstream out;
  out << "record_ordinal,reason\n";
  for (const auto& r : rejects)
    out << r.record_ordinal << ',' << r.reason << "\n";
  write_file(path, out.str());
}

void write_histories_tsv(
    const std::string& path,
    const std::map<std::string, PlayerHistory>& histories) {
  std::ostringstream out;
  out << "account_id\tmatch_index\tmatch_id\tt1\tt2\tt3\tt4\n";
  for (const auto& [id, hist] : histories) {
    for (const auto& e : hist.entries) {
      out << id << '\t' << e.match_index << '\t' << e.match_id;
      for (const auto& mate : e.teammates) out << '\t' << mate;
      out << "\n";
    }
  }
  write_file(path, out.str());
}

std::map<std::string, PlayerHistory> read_histories_tsv(
    const std::string& path) {
  const std::string content = read_file(path);
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line))
    throw DataError("empty histories file: " + path);
  std::map<std::string, PlayerHistory> histories;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 7)
      throw DataError("bad histories row in " + path + ": " + line);
    auto& hist = histories[fields[0]];
    hist.account_id = fields[0];
    HistoryEntry e;
    e.match_index = std::stoull(fields[1]);
    e.match_id = fields[2];
    for (std::size_t k = 0; k < 4; ++k) e.teammates[k] = fields[3 + k];
    if (e.match_index != hist.entries.size())
      throw DataError("history rows out of order in " + path);
    hist.entries.push_back(std::move(e));
  }
  return histories;
}

// --- rating artifacts ------------------------------------------------------

void write_timelines_csv(
    const std::string& path,
    const std::map<std::string, rating::RatingTimeline>& timelines) {
  std::ostringstream out;
  out << "account_id,match_index,mu,sigma\n";
  for (const auto& [id, tl] : timelines) {
    for (const auto& p : tl.points) {
      out << id << ',' << p.match_index << ',' << format_double(p.rating.mu)
          << ',' << format_double(p.rating.sigma) << "\n";
    }
  }
  write_file(path, out.str());
}

std::map<std::string, rating::RatingTimeline> read_timelines_csv(
    const std::string& path) {
  const std::string content = read_file(path);
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line))
    throw DataError("empty timelines file: " + path);
  std::map<std::string, rating::RatingTimeline> timelines;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 4)
      throw DataError("bad timeline row in " + path + ": " + line);
    auto& tl = timelines[fields[0]];
    tl.account_id = fields[0];
    tl.points.push_back({std::stoull(fields[1]),
                         {std::stod(fields[2]), std::stod(fields[3])}});
  }
  return timelines;
}

void write_decile_csv(const std::string& path,
                      const std::vector<rating::DecileRow>& rows) {
  std::ostringstream out;
  out << "group,match_index,mean_mu,std_mu\n";
  for (const auto& r : rows) {
    out << r.group << ',' << r.match_index << ',' << format_double(r.mean_mu)
        << ',' << format_double(r.std_mu) << "\n";
  }
  write_file(path, out.str());
}

// --- networks ---------------------------------------------------------------

void write_network_tsv(const std::string& path,
                       const perfnet::PerformanceNetwork& net) {
  std::vector<char> seen(net.node_count(), 0);
  for (const auto& e : net.edges) {
    seen[static_cast<std::size_t>(e.src)] = 1;
    seen[static_cast<std::size_t>(e.dst)] = 1;
  }
  if (std::count(seen.begin(), seen.end(), 1) !=
      static_cast<std::ptrdiff_t>(net.node_count()))
    throw DataError(
        "write_network_tsv: isolated nodes cannot be represented in the "
        "edge-list format");

  std::ostringstream out;
  out << "kind=" << perfnet::kind_name(net.kind) << "\tnodes="
      << net.node_count() << "\n";
  for (const auto& e : net.edges) {
    out << net.node_ids[static_cast<std::size_t>(e.src)] << '\t'
        << net.node_ids[static_cast<std::size_t>(e.dst)] << '\t'
        << format_double(e.weight) << '\t' << e.co_play_count << "\n";
  }
  write_file(path, out.str());
}

perfnet::PerformanceNetwork read_network_tsv(const std::string& path) {
  const std::string content = read_file(path);
  std::istringstream in(content);
  std::string header;
  if (!std::getline(in, header))
    throw DataError("empty network file: " + path);
  const auto head = split(header, '\t');
  if (head.size() != 2 || head[0].rfind("kind=", 0) != 0 ||
      head[1].rfind("nodes=", 0) != 0)
    throw DataError("bad network header in " + path + ": " + header);
  const auto kind = perfnet::parse_kind(head[0].substr(5));
  const auto declared_nodes = std::stoull(head[1].substr(6));

  struct RawEdge {
    std::string src, dst;
    double weight;
    int count;
  };
  std::vector<RawEdge> raw;
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 4)
      throw DataError("bad network row in " + path + ": " + line);
    raw.push_back({fields[0], fields[1], std::stod(fields[2]),
                   std::stoi(fields[3])});
    ids.insert(fields[0]);
    ids.insert(fields[1]);
  }
  if (ids.size() != declared_nodes)
    throw DataError("network node count mismatch in " + path + ": header " +
                    std::to_string(declared_nodes) + ", edges cover " +
                    std::to_string(ids.size()));

  perfnet::PerformanceNetwork net;
  net.kind = kind;
  net.node_ids.assign(ids.begin(), ids.end());
  for (const auto& e : raw) {
    net.edges.push_back({net.index_of(e.src), net.index_of(e.dst), e.weight,
                         e.count});
  }
  std::sort(net.edges.begin(), net.edges.end(),
            [](const perfnet::Edge& a, const perfnet::Edge& b) {
              return std::pair{a.src, a.dst} < std::pair{b.src, b.dst};
            });
  return net;
}

void write_histogram_csv(const std::string& path,
                         const std::vector<stats::HistogramBin>& bins) {
  std::ostringstream out;
  out << "bin_low,bin_high,count\n";
  for (const auto& b : bins) {
    out << format_double(b.lo) << ',' << format_double(b.hi) << ',' << b.count
        << "\n";
  }
  write_file(path, out.str());
}

// --- models ------------------------------------------------------------------

namespace {

json matrix_to_json(const Matrix& m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
  m.data = j.at("data").get<std::vector<double>>();
  if (m.data.size() != static_cast<std::size_t>(m.rows) * m.cols)
    throw DataError("checkpoint matrix shape mismatch");
  return m;
}

const char* activation_name(models::Activation a) {
  return a == models::Activation::relu ? "relu" : "linear";
}

models::Activation activation_from(const std::string& s) {
  if (s == "relu") return models::Activation::relu;
  if (s == "linear") return models::Activation::linear;
  throw DataError("unknown activation in checkpoint: " + s);
}

json layers_to_json(const std::vector<models::Layer>& layers) {
  json out = json::array();
  for (const auto& l : layers) {
    out.push_back({{"w", matrix_to_json(l.w)},
                   {"b", l.b},
                   {"activation", activation_name(l.act)}});
  }
  return out;
}

std::vector<models::Layer> layers_from_json(const json& j) {
  std::vector<models::Layer> out;
  for (const auto& lj : j) {
    models::Layer l;
    l.w = matrix_from_json(lj.at("w"));
    l.b = lj.at("b").get<std::vector<double>>();
    l.act = activation_from(lj.at("activation").get<std::string>());
    out.push_back(std::move(l));
  }
  return out;
}

}  // namespace

void save_factorization(const std::string& path,
                        const models::FactorizationParams& params,
                        std::uint64_t seed,
                        const std::map<std::string, std::string>& config_echo) {
  json j;
  j["model"] = "factorization";
  j["seed"] = seed;
  j["config"] = config_echo;
  j["lambda"] = params.lambda;
  j["u"] = matrix_to_json(params.u);
  j["v"] = matrix_to_json(params.v);
  write_file(path, j.dump(2) + "\n");
}

models::FactorizationParams load_factorization(const std::string& path) {
  const json j = json::parse(read_file(path));
  if (j.at("model") != "factorization")
    throw DataError("not a factorization checkpoint: " + path);
  models::FactorizationParams params;
  params.lambda = j.at("lambda").get<double>();
  params.u = matrix_from_json(j.at("u"));
  params.v = matrix_from_json(j.at("v"));
  return params;
}

void save_autoencoder(const std::string& path,
                      const models::AutoencoderParams& params,
                      std::uint64_t seed, bool masked,
                      const std::map<std::string, std::string>& config_echo) {
  json j;
  j["model"] = masked ? "teammate_ae" : "traditional_ae";
  j["seed"] = seed;
  j["config"] = config_echo;
  j["masked"] = masked;
  j["encoder"] = layers_to_json(params.encoder);
  j["decoder"] = layers_to_json(params.decoder);
  write_file(path, j.dump(2) + "\n");
}

models::AutoencoderParams load_autoencoder(const std::string& path,
                                           bool* masked) {
  const json j = json::parse(read_file(path));
  if (!j.contains("encoder"))
    throw DataError("not an autoencoder checkpoint: " + path);
  if (masked) *masked = j.at("masked").get<bool>();
  models::AutoencoderParams params;
  params.encoder = layers_from_json(j.at("encoder"));
  params.decoder = layers_from_json(j.at("decoder"));
  return params;
}

void write_embedding_csv(const std::string& path,
                         const std::vector<std::string>& node_ids,
                         const Matrix& y) {
  std::ostringstream out;
  out << "node_id";
  for (int k = 1; k <= y.cols; ++k) out << ",y_" << k;
  out << "\n";
  for (int i = 0; i < y.rows; ++i) {
    out << node_ids[static_cast<std::size_t>(i)];
    for (int k = 0; k < y.cols; ++k) out << ',' << format_double(y(i, k));
    out << "\n";
  }
  write_file(path, out.str());
}

// --- evaluation -------------------------------------------------------------

void write_report_cells_csv(const std::string& path,
                            const std::vector<eval::MetricCell>& cells) {
  std::ostringstream out;
  out << "model,kind,d,sample,metric,value\n";
  for (const auto& c : cells) {
    out << c.model << ',' << c.kind << ',' << c.d << ',' << c.sample << ','
        << c.metric << ',' << format_double(c.value) << "\n";
  }
  write_file(path, out.str());
}

void write_report_aggregates_csv(const std::string& path,
                                 const std::vector<eval::AggregateRow>& rows) {
  std::ostringstream out;
  out << "model,kind,d,metric,mean,std,gain_mean,gain_std\n";
  for (const auto& r : rows) {
    out << r.model << ',' << r.kind << ',' << r.d << ',' << r.metric << ','
        << format_double(r.mean) << ',' << format_double(r.stddev) << ','
        << format_double(r.gain_mean) << ',' << format_double(r.gain_std)
        << "\n";
  }
  write_file(path, out.str());
}

void write_curve_csv(const std::string& path,
                     const std::vector<eval::CurvePoint>& points) {
  std::ostringstream out;
  out << "k,model,value\n";
  for (const auto& p : points)
    out << p.k << ',' << p.model << ',' << format_double(p.value) << "\n";
  write_file(path, out.str());
}

// --- split artifacts ----------------------------------------------------------

void write_edges_tsv(const std::string& path,
                     const std::vector<perfnet::Edge>& edges,
                     const std::vector<std::string>& node_ids) {
  std::ostringstream out;
  out << "src\tdst\tweight\tco_play_count\n";
  for (const auto& e : edges) {
    out << node_ids[static_cast<std::size_t>(e.src)] << '\t'
        << node_ids[static_cast<std::size_t>(e.dst)] << '\t'
        << format_double(e.weight) << '\t' << e.co_play_count << "\n";
  }
  write_file(path, out.str());
}

std::vector<perfnet::Edge> read_edges_tsv(
    const std::string& path, const std::vector<std::string>& node_ids) {
  const std::string content = read_file(path);
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty edge file: " + path);
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < node_ids.size(); ++i)
    index[node_ids[i]] = static_cast<int>(i);
  std::vector<perfnet::Edge> edges;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 4)
      throw DataError("bad edge row in " + path + ": " + line);
    const auto src = index.find(fields[0]);
    const auto dst = index.find(fields[1]);
    if (src == index.end() || dst == index.end())
      throw DataError("edge references unknown node in " + path);
    edges.push_back({src->second, dst->second, std::stod(fields[2]),
                     std::stoi(fields[3])});
  }
  return edges;
}

}  // namespace coplaynet::io
