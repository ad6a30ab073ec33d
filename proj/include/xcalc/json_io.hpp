#pragma once

#include <json.hpp>
#include <string>

#include "xcalc/derivation.hpp"
#include "xcalc/parse.hpp"
#include "xcalc/rewrite.hpp"

namespace xcalc {

// Derivation JSON:
//   {system, rule, conclusion: {net, gamma: {ident: type}, delta: {...}},
//    rule_data: {cut_type?, subject?, index?}, premises: [...]}
// nlohmann::json orders keys, so a fixed input serialises byte-stably.

inline nlohmann::json derivation_to_json(const DerivPtr& d) {
  nlohmann::json j;
  j["system"] = system_name(d->system);
  j["rule"] = rule_text(d->rule);
  nlohmann::json concl;
  concl["net"] = print_net(d->conclusion.net);
  nlohmann::json g = nlohmann::json::object();
  for (auto& [k, v] : d->conclusion.gamma) g[k] = print_type(v);
  nlohmann::json dl = nlohmann::json::object();
  for (auto& [k, v] : d->conclusion.delta) dl[k] = print_type(v);
  concl["gamma"] = g;
  concl["delta"] = dl;
  j["conclusion"] = concl;
  nlohmann::json data = nlohmann::json::object();
  if (d->data.cut_type) data["cut_type"] = print_type(d->data.cut_type);
  if (!d->data.subject.empty()) data["subject"] = d->data.subject;
  if (d->data.index) data["index"] = d->data.index;
  j["rule_data"] = data;
  nlohmann::json prems = nlohmann::json::array();
  for (auto& p : d->premises) prems.push_back(derivation_to_json(p));
  j["premises"] = prems;
  return j;
}

inline DerivPtr derivation_from_json(const nlohmann::json& j) {
  auto sys = system_from_name(j.at("system").get<std::string>());
  if (!sys) throw std::runtime_error("unknown system: " + j.at("system").get<std::string>());
  auto rule = rule_from_text(j.at("rule").get<std::string>());
  if (!rule) throw std::runtime_error("unknown rule: " + j.at("rule").get<std::string>());
  const auto& concl = j.at("conclusion");
  Judgement jd;
  // Bound names must survive the round trip exactly: parse without the
  // Barendregt refresh and trust the checker to reject bad nets.
  {
    std::string net_text = concl.at("net").get<std::string>();
    detail::NetParser p(net_text);
    jd.net = p.parse();
    std::set<std::string> socks, plugs;
    detail::check_namespaces(jd.net, socks, plugs);
  }
  for (auto& [k, v] : concl.at("gamma").items())
    jd.gamma[k] = normalize(parse_type(v.get<std::string>()));
  for (auto& [k, v] : concl.at("delta").items())
    jd.delta[k] = normalize(parse_type(v.get<std::string>()));
  RuleData data;
  if (j.contains("rule_data")) {
    const auto& rd = j.at("rule_data");
    if (rd.contains("cut_type")) data.cut_type = normalize(parse_type(rd.at("cut_type").get<std::string>()));
    if (rd.contains("subject")) data.subject = rd.at("subject").get<std::string>();
    if (rd.contains("index")) data.index = rd.at("index").get<int>();
  }
  std::vector<DerivPtr> prems;
  if (j.contains("premises"))
    for (auto& p : j.at("premises")) prems.push_back(derivation_from_json(p));
  return mk_node(*sys, *rule, std::move(jd), std::move(prems), std::move(data));
}

inline nlohmann::json trace_to_json(const Trace& tr) {
  nlohmann::json j = nlohmann::json::array();
  int k = 1;
  for (auto& st : tr.steps) {
    nlohmann::json e;
    e["step"] = k++;
    e["rule"] = rule_name(st.redex.rule);
    e["path"] = print_path(st.redex.position);
    e["net"] = print_net(st.result);
    j.push_back(e);
  }
  return j;
}

}  // namespace xcalc
