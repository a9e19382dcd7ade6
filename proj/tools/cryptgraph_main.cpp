/*
 * Copyright 2026 The CryptGraph Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// cryptgraph: one binary, several roles.
//
//   keygen          write public.key / secret.key
//   encrypt-graph   edge list -> encrypted graph file (public key only)
//   run-client      user side: answer outsourcing requests (secret key)
//   serve-cloud     cloud side: run an algorithm against a remote client
//   decrypt-result  user side: decode the cloud's output into a report
//   analyze         all of the above in one process
//   plain           plaintext reference result
//   report          compare two result files
//   bench           analyze with a timing table

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cryptgraph/analytics/pipelines.hpp"
#include "cryptgraph/analytics/result.hpp"
#include "cryptgraph/graph/oracles.hpp"
#include "cryptgraph/he/keyfiles.hpp"
#include "cryptgraph/outsourcing/session.hpp"

namespace cryptgraph {
namespace {

enum ExitCode {
  kExitOk = 0,
  kExitConfig = 2,
  kExitIo = 3,
  kExitProtocol = 4,
  kExitCrypto = 5,
  kExitDepth = 6,
};

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParameter:
    case ErrorCode::kScale:
    case ErrorCode::kValidation:
    case ErrorCode::kSyntax:
    case ErrorCode::kGraphKind:
      return kExitConfig;
    case ErrorCode::kIo:
    case ErrorCode::kMalformed:
      return kExitIo;
    case ErrorCode::kProtocol:
    case ErrorCode::kTransport:
    case ErrorCode::kFrame:
      return kExitProtocol;
    case ErrorCode::kEncoding:
    case ErrorCode::kCorruption:
    case ErrorCode::kFingerprint:
    case ErrorCode::kPrivacy:
      return kExitCrypto;
    case ErrorCode::kDepth:
      return kExitDepth;
  }
  return kExitConfig;
}

// ---------------------------------------------------------------------------
// Shared flags.

struct SeedFlag {
  std::optional<std::uint64_t> value;

  Seed For(std::string_view role) const {
    return value ? DeriveSeed(SeedFromInteger(*value), role) : RandomSeed();
  }
};

struct AlgorithmFlags {
  std::string algorithm = "cc";
  int iterations = 20;
  std::string damping = "85/100";
  std::string base_scale = "1000000";
  std::string value_scale = "10000000";
  std::string reciprocal_scale = "10000000";
  bool report_convergence = false;
  double epsilon = 1e-6;
  unsigned threads = 1;

  void Add(CLI::App* app) {
    app->add_option("--algorithm", algorithm, "cc or pagerank")
        ->check(CLI::IsMember({"cc", "pagerank"}));
    app->add_option("--iterations", iterations, "pagerank iterations")->capture_default_str();
    app->add_option("--damping", damping, "pagerank damping as NUM/DEN")->capture_default_str();
    app->add_option("--base-scale", base_scale, "fixed-point scale for cc")
        ->capture_default_str();
    app->add_option("--value-scale", value_scale, "pagerank value scale")
        ->capture_default_str();
    app->add_option("--reciprocal-scale", reciprocal_scale, "pagerank reciprocal scale")
        ->capture_default_str();
    app->add_flag("--report-convergence", report_convergence,
                  "let the client report convergence and stop early");
    app->add_option("--epsilon", epsilon, "convergence threshold")->capture_default_str();
    app->add_option("--threads", threads, "worker threads")->capture_default_str();
  }

  RationalConst Damping() const { return ParseRational(damping); }

  ScalePolicy Policy() const {
    ScalePolicy p;
    p.base_scale = ParsePositive(base_scale, "--base-scale");
    p.Validate();
    return p;
  }

  PageRankConfig PageRank() const {
    PageRankConfig cfg;
    cfg.damping = Damping();
    cfg.iterations = iterations;
    cfg.value_scale = ParsePositive(value_scale, "--value-scale");
    cfg.reciprocal_scale = ParsePositive(reciprocal_scale, "--reciprocal-scale");
    cfg.use_convergence_flag = report_convergence;
    cfg.epsilon = epsilon;
    return cfg;
  }

  static BigInt ParsePositive(const std::string& s, const char* flag) {
    BigInt v;
    try {
      v = ParseDecimal(s);
    } catch (const MalformedError&) {
      throw ParameterError(std::string(flag) + " must be a positive integer, got '" + s + "'");
    }
    if (v < 1) throw ParameterError(std::string(flag) + " must be positive");
    return v;
  }

  static RationalConst ParseRational(const std::string& s) {
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) throw std::invalid_argument(s);
      std::size_t p1 = 0, p2 = 0;
      const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
      const long long num = std::stoll(a, &p1), den = std::stoll(b, &p2);
      if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument(s);
      return RationalConst(num, den);
    } catch (const std::logic_error&) {
      throw ParameterError("--damping must look like NUM/DEN, got '" + s + "'");
    }
  }
};

struct OutputFlags {
  std::string out;
  std::string format = "text";
  bool timings = false;

  void Add(CLI::App* app) {
    app->add_option("--out", out, "write the JSON report here");
    app->add_option("--format", format, "stdout format")
        ->check(CLI::IsMember({"text", "json", "none"}))
        ->capture_default_str();
    app->add_flag("--timings", timings, "include per-phase timings");
  }

  void Emit(const AnalyticsResult& r) const {
    if (!out.empty()) {
      const std::string doc = ResultToJson(r, timings).dump(2) + "\n";
      WriteFileBytes(out, std::span(reinterpret_cast<const std::uint8_t*>(doc.data()),
                                    doc.size()));
    }
    if (format == "json") {
      std::cout << ResultToJson(r, timings).dump(2) << "\n";
    } else if (format == "text") {
      std::cout << ResultToText(r, timings);
    }
  }
};

std::string ClientAddress(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("CRYPTGRAPH_CLIENT_ADDR"); env && *env) return env;
  throw ParameterError("no client address: pass --client-addr or set CRYPTGRAPH_CLIENT_ADDR");
}

// ---------------------------------------------------------------------------
// Cloud computation shared by serve-cloud, analyze and bench.

struct CloudOutput {
  std::string algorithm;
  RationalConst damping{85, 100};
  EncryptedVector values;
  std::optional<int> iterations;
  std::optional<bool> converged;
  PhaseTimings timings;
  ChannelCounts counts;
};

CloudOutput RunCloud(const Evaluator& eval, Encryptor& enc, const EncryptedGraph& eg,
                     const AlgorithmFlags& flags, Channel& channel) {
  AnalyticsOptions opts;
  opts.threads = flags.threads;
  CloudOutput out;
  out.algorithm = flags.algorithm;
  if (flags.algorithm == "cc") {
    ClusteringOutput r =
        EncryptedClusteringCoefficient(eval, enc, eg, channel, flags.Policy(), opts);
    out.values = std::move(r.cc);
    out.timings = std::move(r.timings);
  } else {
    const PageRankConfig cfg = flags.PageRank();
    PageRankOutput r = EncryptedPageRank(eval, enc, eg, cfg, channel, opts);
    out.damping = cfg.damping;
    out.values = std::move(r.ranks);
    out.iterations = r.iterations_run;
    out.converged = r.converged;
    out.timings = std::move(r.timings);
  }
  out.counts = channel.counts();
  return out;
}

std::map<std::string, std::size_t> CountsMap(const ChannelCounts& c) {
  return {{"reciprocal_batches", c.reciprocal_batches},
          {"reciprocal_items", c.reciprocal_items},
          {"rescale_batches", c.rescale_batches},
          {"rescale_items", c.rescale_items}};
}

// User side: decode and, given the plain graph, compare with the oracle.
AnalyticsResult BuildReport(std::vector<double> values, const std::string& algorithm,
                            const std::string& backend, const RationalConst& damping,
                            std::optional<int> iterations, const Graph* plain) {
  std::optional<std::vector<double>> oracle;
  if (plain) {
    if (plain->n() != static_cast<int>(values.size())) {
      throw ValidationError("plain graph has " + std::to_string(plain->n()) +
                            " vertices but the result has " + std::to_string(values.size()));
    }
    oracle = algorithm == "cc" ? ClusteringCoefficientPlain(*plain)
                               : PageRankPlain(*plain, damping.ToDouble(), iterations.value_or(0));
  }
  return MakeResult(algorithm, backend, std::move(values), oracle ? &*oracle : nullptr);
}

Graph LoadGraph(const std::string& path) {
  LoadStats stats;
  Graph g = LoadEdgeListFile(path, &stats);
  if (stats.duplicates_dropped > 0) {
    std::cerr << "note: dropped " << stats.duplicates_dropped << " repeated edge(s) from "
              << path << "\n";
  }
  return g;
}

// ---------------------------------------------------------------------------
// Subcommands.

struct KeygenCmd {
  std::string out;
  std::string backend = "lattice";
  std::size_t ring_degree = 4096;
  SeedFlag seed;
  bool force = false;

  void Add(CLI::App& app) {
    auto* c = app.add_subcommand("keygen", "generate a key pair");
    c->add_option("--out", out, "directory for public.key and secret.key")->required();
    c->add_option("--backend", backend)->check(CLI::IsMember({"lattice", "transparent"}));
    c->add_option("--ring-degree", ring_degree, "lattice ring degree")->capture_default_str();
    c->add_option("--seed", seed.value, "deterministic keys");
    c->add_flag("--force", force, "overwrite existing key files");
    c->callback([this] { Run(); });
  }

  void Run() {
    HeParams params =
        HeParams::Defaults(backend == "lattice" ? BackendKind::kLattice : BackendKind::kTransparent);
    params.ring_degree = ring_degree;
    const KeyPair kp = Keygen(params, seed.For("keygen"));
    WriteKeyFiles(out, kp, force);
    std::cout << "wrote " << out << "/" << kPublicKeyFile << " and " << out << "/"
              << kSecretKeyFile << " (" << backend << ")\n";
  }
};

struct EncryptGraphCmd {
  std::string graph, keys, out;
  std::string base_scale = "1000000";
  SeedFlag seed;

  void Add(CLI::App& app) {
    auto* c = app.add_subcommand("encrypt-graph", "encrypt an edge list under a public key");
    c->add_option("--graph", graph, "edge list")->required();
    c->add_option("--keys", keys, "key directory or public key file")->required();
    c->add_option("--out", out, "encrypted graph file")->required();
    c->add_option("--base-scale", base_scale, "scale for edge weights")->capture_default_str();
    c->add_option("--seed", seed.value, "deterministic encryption");
    c->callback([this] { Run(); });
  }

  void Run() {
    const PublicKey pk = LoadPublicKey(keys);
    const Graph g = LoadGraph(graph);
    Encryptor enc(pk, seed.For("graph"));
    ScalePolicy policy;
    policy.base_scale = AlgorithmFlags::ParsePositive(base_scale, "--base-scale");
    const EncryptedGraph eg = EncryptGraph(enc, g, policy);
    WriteFileBytes(out, SerializeEncryptedGraph(eg, *pk.context));
    std::cout << "encrypted " << GraphKindName(g.kind()) << " graph with " << g.n()
              << " vertices (" << eg.adjacency.data().size() << " ciphertexts) to " << out
              << "\n";
  }
};

struct RunClientCmd {
  std::string keys, listen;
  SeedFlag seed;
  bool once = false;

  void Add(CLI::App& app) {
    auto* c = app.add_subcommand("run-client", "serve outsourcing requests (holds the secret key)");
    c->add_option("--keys", keys, "key directory")->required();
    c->add_option("--listen", listen, "host:port; port 0 picks one (default CRYPTGRAPH_CLIENT_ADDR)");
    c->add_option("--seed", seed.value, "deterministic re-encryption");
    c->add_flag("--once", once, "exit after the first session");
    c->callback([this] { Run(); });
  }

  void Run() {
    const KeyPair kp = LoadKeyPair(keys);
    ClientHandler handler(kp.secret_key, kp.public_key, seed.For("client"));
    const HostPort hp = ParseHostPort(ClientAddress(listen));
    TcpListener listener(hp);
    std::cout << "listening on " << hp.host << ":" << listener.port() << std::endl;
    const std::size_t max_frame = MaxFrameFromEnv();
    for (;;) {
      std::unique_ptr<ByteStream> stream = listener.Accept();
      try {
        Serve(*stream, handler, max_frame);
      } catch (const Error& e) {
        std::cerr << "session ended: " << e.what() << "\n";
        if (once) throw;
      }
      std::cerr << "served " << handler.counts().requests << " request(s) so far\n";
      if (once) break;
    }
  }
};

struct ServeCloudCmd {
  std::string keys, graph, client_addr, out;
  AlgorithmFlags flags;
  SeedFlag seed;
  bool timings = false;

  void Add(CLI::App& app) {
    auto* c = app.add_subcommand("serve-cloud", "run an algorithm on an encrypted graph");
    c->add_option("--keys", keys, "key directory or public key file")->required();
    c->add_option("--graph", graph, "encrypted graph file")->required();
    c->add_option("--client-addr", client_addr, "host:port of run-client");
    c->add_option("--out", out, "encrypted result file")->required();
    c->add_option("--seed", seed.value, "deterministic cloud-side encryptions");
    c->add_flag("--timings", timings, "record per-phase timings in the result file");
    flags.Add(c);
    c->callback([this] { Run(); });
  }

  void Run() {
    // The cloud role never opens secret.key; a secret key named directly
    // is refused by LoadPublicKey.
    const PublicKey pk = LoadPublicKey(keys);
    const ContextPtr ctx = pk.context;
    const EncryptedGraph eg = DeserializeEncryptedGraph(ReadFileBytes(graph), *ctx);
    // Connect before any computation so an absent client fails fast.
    Channel channel(TcpConnect(ParseHostPort(ClientAddress(client_addr))), ctx,
                    MaxFrameFromEnv());
    Evaluator eval(ctx);
    Encryptor enc(pk, seed.For("cloud"));
    const CloudOutput r = RunCloud(eval, enc, eg, flags, channel);
    channel.Close();

    nlohmann::ordered_json j;
    j["format"] = "cryptgraph-result-1";
    j["algorithm"] = r.algorithm;
    j["backend"] = std::string(BackendName(ctx->backend()));
    j["damping"] = r.damping.ToString();
    if (r.iterations) j["iterations"] = *r.iterations;
    if (r.converged) j["converged"] = *r.converged;
    j["outsourcing"] = CountsMap(r.counts);
    if (timings) j["timings"] = r.timings;
    j["values"] = Base64Encode(SerializeEncryptedVector(r.values, *ctx));
    const std::string doc = j.dump() + "\n";
    WriteFileBytes(out, std::span(reinterpret_cast<const std::uint8_t*>(doc.data()), doc.size()));
    std::cout << r.algorithm << " on " << eg.meta.n << " vertices: "
              << r.counts.reciprocal_batches << " reciprocal batch(es), "
              << r.counts.rescale_batches << " rescale batch(es); wrote " << out << "\n";
  }
};

struct DecryptResultCmd {
  std::string keys, in, graph;
  OutputFlags output;

  void Add(CLI::App& app) {
    auto* c = app.add_subcommand("decrypt-result", "decode a serve-cloud result (secret key)");
    c->add_option("--keys", keys, "key directory")->required();
    c->add_option("--in", in, "encrypted result file")->required();
    c->add_option("--graph", graph, "plain edge list, for the oracle comparison");
    output.Add(c);
    c->callback([this] { Run(); });
  }

  void Run() {
    const KeyPair kp = LoadKeyPair(keys);
    const Bytes raw = ReadFileBytes(in);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(raw.begin(), raw.end());
      if (j.at("format") != "cryptgraph-result-1") throw MalformedError("unknown result format");
    } catch (const nlohmann::json::exception& e) {
      throw MalformedError(std::string("bad result file: ") + e.what());
    }
    try {
      const std::string algorithm = j.at("algorithm").get<std::string>();
      const RationalConst damping = AlgorithmFlags::ParseRational(j.at("damping"));
      std::optional<int> iterations;
      if (j.contains("iterations")) iterations = j["iterations"].get<int>();
      const EncryptedVector v = DeserializeEncryptedVector(
          Base64Decode(j.at("values").get<std::string>()), *kp.public_key.context);
      std::optional<Graph> plain;
      if (!graph.empty()) plain = LoadGraph(graph);
      AnalyticsResult r =
          BuildReport(DecryptVector(Decryptor(kp.secret_key), v), algorithm,
                      j.at("backend").get<std::string>(), damping, iterations,
                      plain ? &*plain : nullptr);
      r.iterations = iterations;
      if (j.contains("converged")) r.converged = j["converged"].get<bool>();
      r.outsourcing = j.at("outsourcing").get<std::map<std::string, std::size_t>>();
      if (j.contains("timings")) r.timings = j["timings"].get<std::map<std::string, double>>();
      output.Emit(r);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedError(std::string("bad result file: ") + e.what());
    }
  }
};

// analyze and bench: every role in one process.
struct LocalRun {
  std::string graph, keys, backend = "transparent", transport = "inproc";
  int vertices = 0;
  AlgorithmFlags flags;
  SeedFlag seed;

  void Add(CLI::App* c) {
    c->add_option("--graph", graph, "plain edge list")->required();
    c->add_option("--keys", keys, "key directory (required for lattice)");
    c->add_option("--backend", backend)->check(CLI::IsMember({"transparent", "lattice"}));
    c->add_option("--transport", transport)->check(CLI::IsMember({"inproc", "tcp"}));
    c->add_option("--vertices", vertices, "use the subgraph induced by the first K vertices");
    c->add_option("--seed", seed.value, "fixed seed for keys and encryption");
    flags.Add(c);
  }

  AnalyticsResult Run() const {
    std::optional<KeyPair> kp;
    if (!keys.empty()) {
      kp = LoadKeyPair(keys);
      const std::string kb(BackendName(kp->public_key.context->backend()));
      if (kb != backend) {
        throw ParameterError("--backend " + backend + " but the keys are for " + kb);
      }
    } else if (backend == "lattice") {
      throw ParameterError("the lattice backend needs --keys (run keygen first)");
    } else {
      kp = Keygen(HeParams::Defaults(BackendKind::kTransparent), seed.For("keygen"));
    }
    Graph g = LoadGraph(graph);
    if (vertices > 0 && vertices < g.n()) {
      std::vector<int> first(vertices);
      std::iota(first.begin(), first.end(), 0);
      g = InducedSubgraph(g, first);
    }
    const ContextPtr ctx = kp->public_key.context;
    Encryptor graph_enc(kp->public_key, seed.For("graph"));
    const EncryptedGraph eg = EncryptGraph(graph_enc, g, flags.Policy());

    ClientHandler handler(kp->secret_key, kp->public_key, seed.For("client"));
    ClientSession session(handler,
                          transport == "tcp" ? TransportKind::kTcp : TransportKind::kInProcess,
                          MaxFrameFromEnv());
    Evaluator eval(ctx);
    Encryptor cloud_enc(kp->public_key, seed.For("cloud"));
    CloudOutput out = RunCloud(eval, cloud_enc, eg, flags, session.channel());
    session.Finish();

    AnalyticsResult r = BuildReport(DecryptVector(Decryptor(kp->secret_key), out.values),
                                    out.algorithm, backend, out.damping, out.iterations, &g);
    r.iterations = out.iterations;
    r.converged = out.converged;
    r.outsourcing = CountsMap(out.counts);
    r.timings = std::move(out.timings);
    return r;
  }
};

struct AnalyzeCmd {
  LocalRun run;
  OutputFlags output;

  void Add(CLI::App& app) {
    auto* c = app.add_subcommand("analyze", "encrypt, compute and decode in one process");
    run.Add(c);
    output.Add(c);
    c->callback([this] { output.Emit(run.Run()); });
  }
};

struct BenchCmd {
  LocalRun run;

  void Add(CLI::App& app) {
    auto* c = app.add_subcommand("bench", "time the encrypted pipeline");
    run.Add(c);
    c->callback([this] { Run(); });
  }

  void Run() {
    const AnalyticsResult r = run.Run();
    std::printf("%-24s %s\n", "algorithm", r.algorithm.c_str());
    std::printf("%-24s %s\n", "backend", r.backend.c_str());
    std::printf("%-24s %d\n", "vertices", r.n());
    for (const auto& [phase, s] : r.timings) std::printf("%-24s %12.6f s\n", phase.c_str(), s);
    if (r.algorithm == "cc") {
      std::printf("%-24s %12.6f s\n", "per-vertex triangles",
                  r.timings.count("triangles_per_vertex") ? r.timings.at("triangles_per_vertex")
                                                          : 0.0);
    } else {
      std::printf("%-24s %12.6f s\n", "per-vertex update",
                  r.timings.count("update_per_vertex") ? r.timings.at("update_per_vertex") : 0.0);
    }
    if (r.mse_vs_oracle) std::printf("%-24s %12.3e\n", "mse vs oracle", *r.mse_vs_oracle);
  }
};

struct PlainCmd {
  std::string graph;
  AlgorithmFlags flags;
  OutputFlags output;

  void Add(CLI::App& app) {
    auto* c = app.add_subcommand("plain", "plaintext reference result");
    c->add_option("--graph", graph, "plain edge list")->required();
    flags.Add(c);
    output.Add(c);
    c->callback([this] { Run(); });
  }

  void Run() {
    const Graph g = LoadGraph(graph);
    AnalyticsResult r;
    if (flags.algorithm == "cc") {
      r = MakeResult("cc", "plain", ClusteringCoefficientPlain(g));
    } else {
      r = MakeResult("pagerank", "plain",
                     PageRankPlain(g, flags.Damping().ToDouble(), flags.iterations));
      r.iterations = flags.iterations;
    }
    output.Emit(r);
  }
};

struct ReportCmd {
  std::string a, b;

  void Add(CLI::App& app) {
    auto* c = app.add_subcommand("report", "compare two result files");
    c->add_option("first", a, "result JSON")->required();
    c->add_option("second", b, "result JSON")->required();
    c->callback([this] { Run(); });
  }

  static AnalyticsResult Load(const std::string& path) {
    const Bytes raw = ReadFileBytes(path);
    try {
      return ResultFromJson(nlohmann::json::parse(raw.begin(), raw.end()));
    } catch (const nlohmann::json::exception& e) {
      throw MalformedError("'" + path + "' is not a result file: " + e.what());
    }
  }

  void Run() { std::cout << CompareText(Load(a), Load(b)); }
};

int Main(int argc, char** argv) {
  CLI::App app{"encrypted graph analytics with outsourced division"};
  app.require_subcommand(1);
  KeygenCmd keygen;
  EncryptGraphCmd encrypt;
  RunClientCmd client;
  ServeCloudCmd cloud;
  DecryptResultCmd decrypt;
  AnalyzeCmd analyze;
  PlainCmd plain;
  ReportCmd report;
  BenchCmd bench;
  keygen.Add(app);
  encrypt.Add(app);
  client.Add(app);
  cloud.Add(app);
  decrypt.Add(app);
  analyze.Add(app);
  plain.Add(app);
  report.Add(app);
  bench.Add(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  } catch (const Error& e) {
    std::cerr << "cryptgraph: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "cryptgraph: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace
}  // namespace cryptgraph

int main(int argc, char** argv) { return cryptgraph::Main(argc, argv); }
