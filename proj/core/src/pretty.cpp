#include "reformine/pretty.hpp"

#include <cassert>
#include <sstream>

namespace reformine {

namespace {

// Binding powers mirror the parser's precedence table.
int binary_lbp(BinaryOp op) {
  switch (op) {
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod:
      return 60;
    case BinaryOp::Add:
    case BinaryOp::Sub:
      return 50;
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
    case BinaryOp::In:
    case BinaryOp::SubsetEq:
      return 40;
    case BinaryOp::And:
      return 35;
    case BinaryOp::Or:
      return 30;
    case BinaryOp::Implies:
      return 25;
    case BinaryOp::Iff:
      return 20;
  }
  return 0;
}

bool is_tight(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add:
    case BinaryOp::Sub:
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod:
      return true;
    default:
      return false;
  }
}

bool right_assoc(BinaryOp op) { return op == BinaryOp::Implies; }

bool comparison(BinaryOp op) {
  switch (op) {
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
    case BinaryOp::In:
    case BinaryOp::SubsetEq:
      return true;
    default:
      return false;
  }
}

struct Printer {
  std::ostringstream os;

  void expr(const NodePtr& e, int ctx_bp, bool rightmost);
  void domain(const NodePtr& d);
  void attrs(const NodePtr& rel_dom);
  void statement(const NodePtr& s);
};

void Printer::expr(const NodePtr& e, int ctx_bp, bool rightmost) {
  switch (e->kind) {
    case Kind::IntLit:
      os << e->ival;
      return;
    case Kind::BoolLit:
      os << (e->bval ? "true" : "false");
      return;
    case Kind::Reference:
      os << e->name;
      return;
    case Kind::TupleLit: {
      os << "(";
      for (std::size_t i = 0; i < e->children.size(); ++i) {
        if (i) os << ", ";
        expr(e->children[i], 0, false);
      }
      os << ")";
      return;
    }
    case Kind::RelationLit: {
      bool set_form = e->children.empty() || e->rel_arity <= 1;
      if (!set_form) os << "relation ";
      os << "{";
      for (std::size_t i = 0; i < e->children.size(); ++i) {
        if (i) os << ", ";
        expr(e->children[i], 0, false);
      }
      os << "}";
      return;
    }
    case Kind::Unary: {
      switch (e->uop) {
        case UnaryOp::ToInt:
          os << "toInt(";
          expr(e->children[0], 0, false);
          os << ")";
          return;
        case UnaryOp::Card:
          os << "|";
          expr(e->children[0], 0, false);
          os << "|";
          return;
        case UnaryOp::Neg:
        case UnaryOp::Not: {
          bool parens = ctx_bp > 70;
          if (parens) os << "(";
          os << (e->uop == UnaryOp::Neg ? "-" : "!");
          expr(e->children[0], 70, parens ? false : rightmost);
          if (parens) os << ")";
          return;
        }
      }
      return;
    }
    case Kind::Binary: {
      int lbp = binary_lbp(e->bop);
      bool parens = ctx_bp > lbp;
      // Comparisons do not chain: a comparison child of a comparison is
      // always parenthesized even though the binding powers tie.
      if (parens) os << "(";
      int left_ctx = right_assoc(e->bop) || comparison(e->bop) ? lbp + 1 : lbp;
      int right_ctx = right_assoc(e->bop) ? lbp : lbp + 1;
      expr(e->children[0], left_ctx, false);
      if (is_tight(e->bop)) {
        os << binary_op_token(e->bop);
      } else {
        os << " " << binary_op_token(e->bop) << " ";
      }
      expr(e->children[1], right_ctx, parens ? false : rightmost);
      if (parens) os << ")";
      return;
    }
    case Kind::Quantifier: {
      bool parens = ctx_bp > 10 && !rightmost;
      if (parens) os << "(";
      const NodePtr& binder = e->children[0];
      const NodePtr& range = binder->children[0];
      os << quant_token(e->quant) << " " << binder->name;
      if (is_domain(range->kind)) {
        os << " : ";
        domain(range);
      } else {
        os << " in ";
        expr(range, 0, false);
      }
      os << " . ";
      expr(e->children[1], 0, true);
      if (parens) os << ")";
      return;
    }
    default:
      if (is_domain(e->kind)) {
        domain(e);
        return;
      }
      assert(false && "not an expression");
      return;
  }
}

void Printer::attrs(const NodePtr& rel_dom) {
  bool any = false;
  for (const auto& c : rel_dom->children) {
    if (!is_attr(c->kind)) continue;
    os << (any ? ", " : "(");
    any = true;
    os << node_token(*c) << " ";
    expr(c->children[0], 0, false);
  }
  if (any) os << ") ";
}

void Printer::domain(const NodePtr& d) {
  switch (d->kind) {
    case Kind::BoolDomain:
      os << "bool";
      return;
    case Kind::IntDomain:
      os << "int(";
      expr(d->children[0], 0, false);
      os << "..";
      if (d->children.size() == 2) expr(d->children[1], 0, false);
      os << ")";
      return;
    case Kind::DomainRef:
      os << d->name;
      return;
    case Kind::RelationDomain: {
      int arity = relation_domain_arity(*d);
      std::vector<NodePtr> comps;
      for (const auto& c : d->children) {
        if (!is_attr(c->kind)) comps.push_back(c);
      }
      if (arity == 1) {
        os << "set ";
        attrs(d);
        os << "of ";
        domain(comps[0]);
      } else {
        os << "relation ";
        attrs(d);
        os << "of (";
        for (std::size_t i = 0; i < comps.size(); ++i) {
          if (i) os << " * ";
          domain(comps[i]);
        }
        os << ")";
      }
      return;
    }
    default:
      assert(false && "not a domain");
  }
}

void Printer::statement(const NodePtr& s) {
  switch (s->kind) {
    case Kind::Find: {
      const NodePtr& dv = s->children[0];
      os << "find " << dv->name << " : ";
      domain(dv->children[0]);
      os << "\n";
      return;
    }
    case Kind::Given: {
      os << "given ";
      bool first = true;
      for (const auto& c : s->children) {
        if (c->kind != Kind::Parameter) continue;
        if (!first) os << ", ";
        first = false;
        os << c->name;
      }
      os << " : ";
      domain(s->children.back());
      os << "\n";
      return;
    }
    case Kind::Letting: {
      os << "letting " << s->children[0]->name << " be ";
      const NodePtr& value = s->children[1];
      if (is_domain(value->kind)) {
        os << "domain ";
        domain(value);
      } else {
        expr(value, 0, true);
      }
      os << "\n";
      return;
    }
    case Kind::Where:
      os << "where ";
      expr(s->children[0], 0, true);
      os << "\n";
      return;
    case Kind::SuchThat: {
      os << "such that\n";
      for (std::size_t i = 0; i < s->children.size(); ++i) {
        os << "    ";
        expr(s->children[i], 0, true);
        if (i + 1 < s->children.size()) os << ",";
        os << "\n";
      }
      return;
    }
    case Kind::Objective:
      os << (s->dir == ObjDir::Minimising ? "minimising " : "maximising ");
      expr(s->children[0], 0, true);
      os << "\n";
      return;
    default:
      assert(false && "not a statement");
  }
}

void annotate_node(std::ostringstream& os, const NodePtr& n,
                   const std::string& prefix, bool last) {
  os << prefix << (last ? "└─ " : "├─ ") << node_token(*n) << "  #"
     << kind_tag(*n) << "\n";
  std::string child_prefix = prefix + (last ? "   " : "│  ");
  for (std::size_t i = 0; i < n->children.size(); ++i) {
    annotate_node(os, n->children[i], child_prefix, i + 1 == n->children.size());
  }
}

}  // namespace

std::string pretty(const Ast& spec) {
  assert(spec && spec->kind == Kind::Root);
  Printer p;
  for (const auto& s : spec->children) p.statement(s);
  return p.os.str();
}

std::string pretty_expr(const NodePtr& node) {
  Printer p;
  if (is_domain(node->kind)) {
    p.domain(node);
  } else {
    p.expr(node, 0, true);
  }
  return p.os.str();
}

std::string annotate(const Ast& spec) {
  std::ostringstream os;
  annotate_node(os, spec, "", true);
  return os.str();
}

}  // namespace reformine
