//! Serde mirror of the workspace file format. See `docs/format.md`.

use std::str::FromStr;

use mapgraded::Q;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Arbitrary-precision integer: a decimal string, or a plain JSON integer on
/// input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Int {
    Str(String),
    Num(i64),
}

impl Int {
    fn parse(&self) -> Result<BigInt, String> {
        match self {
            Int::Str(s) => BigInt::from_str(s.trim()).map_err(|_| format!("not an integer: {s:?}")),
            Int::Num(n) => Ok(BigInt::from(*n)),
        }
    }
}

/// `[basis element, numerator, denominator]`.
pub type Coef = (String, Int, Int);

pub fn coef_value(c: &Coef) -> Result<Q, String> {
    let (num, den) = (c.1.parse()?, c.2.parse()?);
    if den.is_zero() {
        return Err(format!("zero denominator on {}", c.0));
    }
    Ok(Q::new(num, den))
}

pub fn coef(name: &str, q: &Q) -> Coef {
    (name.to_string(), Int::Str(q.numer().to_string()), Int::Str(q.denom().to_string()))
}

/// Matrix entries are written `"p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<Q, String> {
    let q = Q::from_str(s.trim()).map_err(|_| format!("not a rational: {s:?}"))?;
    Ok(q)
}

pub fn show_rational(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceFile {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<CategoryDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub functors: Vec<FunctorDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bifunctors: Vec<BifunctorDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub graded: Vec<GradedDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub graded_functors: Vec<GradedFunctorDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bimodules: Vec<BimoduleDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pseudofunctors: Vec<PseudoDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagrams: Vec<DiagramDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub covers: Vec<CoverDecl>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CategoryDecl {
    /// `morphisms` are `[name, source, target]`, `identities` `[object,
    /// morphism]`, `compositions` `[g, f, g∘f]`; composites with identities
    /// may be left out.
    Table {
        name: String,
        objects: Vec<String>,
        morphisms: Vec<(String, String, String)>,
        identities: Vec<(String, String)>,
        #[serde(default)]
        compositions: Vec<(String, String, String)>,
    },
    /// Identities `1_x`, other morphisms `a<=b`.
    Poset {
        name: String,
        elements: Vec<String>,
        #[serde(default)]
        relations: Vec<(String, String)>,
    },
    /// `0 → 1 → … → length`.
    Chain { name: String, length: usize },
    Terminal { name: String },
    /// Free category on an acyclic graph; `arrows` are `[name, source, target]`.
    Free {
        name: String,
        objects: Vec<String>,
        arrows: Vec<(String, String, String)>,
    },
    /// Full subcategory of `category` on `objects`.
    Full {
        name: String,
        category: String,
        objects: Vec<String>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctorDecl {
    /// Morphism images may be left out when the target hom between the
    /// images of the endpoints has one morphism.
    Table {
        name: String,
        source: String,
        target: String,
        objects: Vec<(String, String)>,
        #[serde(default)]
        morphisms: Vec<(String, String)>,
    },
    Identity { name: String, category: String },
    /// Inclusion of a subcategory, matched by object and morphism names.
    Inclusion { name: String, source: String, target: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BifunctorDecl {
    /// A `left`-`right`-bifunctor. `elems` are `[name, object of right,
    /// object of left]`; `left_action` lists `[u, s, u·s]` and `right_action`
    /// `[s, v, s·v]`. Identity actions and actions with a single possible
    /// value may be left out.
    Table {
        name: String,
        left: String,
        right: String,
        elems: Vec<(String, String, String)>,
        #[serde(default)]
        left_action: Vec<(String, String, String)>,
        #[serde(default)]
        right_action: Vec<(String, String, String)>,
    },
    Identity { name: String, category: String },
    Lower { name: String, functor: String },
    Upper { name: String, functor: String },
}

/// Hom space `mor(src, tgt)` with its basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomDecl {
    pub mor: String,
    pub src: String,
    pub tgt: String,
    pub basis: Vec<String>,
}

/// Basis element `elem` of the hom `mor(src, tgt)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElemRef {
    pub mor: String,
    pub src: String,
    pub tgt: String,
    pub elem: String,
}

/// `left ∘ right = result`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductDecl {
    pub left: ElemRef,
    pub right: ElemRef,
    pub result: Vec<Coef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityDecl {
    pub object: String,
    pub value: Vec<Coef>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GradedDecl {
    /// `objects` are `[object, base object]`. An identity may be left out
    /// when the hom over the base identity has a single basis element, and
    /// products with such identities are then filled in.
    Table {
        name: String,
        base: String,
        objects: Vec<(String, String)>,
        #[serde(default)]
        homs: Vec<HomDecl>,
        #[serde(default)]
        products: Vec<ProductDecl>,
        #[serde(default)]
        identities: Vec<IdentityDecl>,
    },
    /// The ground field over the terminal category.
    Ground { name: String },
    /// `k[x]/(x^n)` over the terminal category.
    TruncatedPolynomial { name: String, n: usize },
    /// Linearization `k U` of a category.
    Free { name: String, base: String },
    /// Linearization of the source of a functor, graded over its target.
    Linearize { name: String, functor: String },
    /// `graded` restricted along a functor into its base.
    Restriction { name: String, graded: String, along: String },
    /// Arrow category of a bimodule.
    Arrow { name: String, bimodule: String },
    /// Total category of a pseudofunctor.
    Grothendieck { name: String, pseudofunctor: String },
}

/// Matrix of a graded functor on the hom `mor(src, tgt)` of its source, rows
/// indexed by the basis of the image hom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomMapDecl {
    pub mor: String,
    pub src: String,
    pub tgt: String,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GradedFunctorDecl {
    /// Homs that are zero in the source may be left out.
    Table {
        name: String,
        source: String,
        target: String,
        base: String,
        objects: Vec<(String, String)>,
        #[serde(default)]
        homs: Vec<HomMapDecl>,
    },
    Identity { name: String, graded: String },
    /// The canonical functor from the restriction of `graded` along `along`.
    Restriction { name: String, graded: String, along: String },
}

/// The space `M_elem(from, to)`: `from` in the right category, `to` in the
/// left one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceRef {
    pub elem: String,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDecl {
    pub elem: String,
    pub from: String,
    pub to: String,
    pub basis: Vec<String>,
}

/// `hom · vec` (left action) or `vec · hom` (right action).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDecl {
    pub hom: ElemRef,
    pub space: SpaceRef,
    pub vec: String,
    pub result: Vec<Coef>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BimoduleDecl {
    /// Actions by identities with a single basis element may be left out.
    Table {
        name: String,
        left: String,
        right: String,
        carrier: String,
        spaces: Vec<SpaceDecl>,
        #[serde(default)]
        left_action: Vec<ActionDecl>,
        #[serde(default)]
        right_action: Vec<ActionDecl>,
    },
    Identity { name: String, graded: String },
    Lower { name: String, functor: String },
    Upper { name: String, functor: String },
    /// `left ⊗ right`.
    Tensor { name: String, left: String, right: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PseudoDecl {
    /// The same graded category at every object of `base`.
    Constant { name: String, base: String, graded: String },
    /// `right → left` over the chain `0 → 1`.
    Arrow { name: String, bimodule: String },
    /// Pieces over `0 → 1 → … → n` with one bimodule per step.
    Chain { name: String, pieces: Vec<String>, steps: Vec<String> },
    /// Lower bimodules of a functorial diagram.
    Diagram { name: String, diagram: String },
}

/// A strict diagram of graded categories: `pieces` are `[object, graded]`,
/// `functors` `[morphism, graded functor]` for the non-identity morphisms.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramDecl {
    pub name: String,
    pub base: String,
    pub pieces: Vec<(String, String)>,
    pub functors: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoverDecl {
    /// Graded functors into `target`.
    Table { name: String, target: String, legs: Vec<String> },
    /// Restrictions to the maximal chains of a poset base.
    Chains { name: String, graded: String },
    /// Chain restrictions plus `extra` random full subcategories.
    Random {
        name: String,
        graded: String,
        extra: usize,
        seed: u64,
    },
}

macro_rules! named {
    ($($t:ident { $($v:ident),* }),*) => {$(
        impl $t {
            pub fn name(&self) -> &str {
                match self {
                    $($t::$v { name, .. } => name,)*
                }
            }
        }
    )*};
}

named! {
    CategoryDecl { Table, Poset, Chain, Terminal, Free, Full },
    FunctorDecl { Table, Identity, Inclusion },
    BifunctorDecl { Table, Identity, Lower, Upper },
    GradedDecl { Table, Ground, TruncatedPolynomial, Free, Linearize, Restriction, Arrow, Grothendieck },
    GradedFunctorDecl { Table, Identity, Restriction },
    BimoduleDecl { Table, Identity, Lower, Upper, Tensor },
    PseudoDecl { Constant, Arrow, Chain, Diagram },
    CoverDecl { Table, Chains, Random }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_accept_strings_and_numbers() {
        let c: Coef = serde_json::from_str(r#"["x", "-3", 6]"#).unwrap();
        assert_eq!(coef_value(&c).unwrap(), Q::new((-1).into(), 2.into()));
        let big: Coef = serde_json::from_str(r#"["y", "123456789012345678901234567890", "1"]"#).unwrap();
        assert_eq!(coef_value(&big).unwrap().numer().to_string(), "123456789012345678901234567890");
        let zero: Coef = serde_json::from_str(r#"["z", "1", "0"]"#).unwrap();
        assert!(coef_value(&zero).is_err());
    }

    #[test]
    fn rationals_round_trip() {
        for s in ["0", "-7", "3/4", "-12/5"] {
            assert_eq!(show_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(show_rational(&parse_rational("6/8").unwrap()), "3/4");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = r#"{"kind": "terminal", "name": "e", "extra": 1}"#;
        assert!(serde_json::from_str::<CategoryDecl>(bad).is_err());
        let ok = r#"{"kind": "terminal", "name": "e"}"#;
        assert_eq!(serde_json::from_str::<CategoryDecl>(ok).unwrap().name(), "e");
    }
}
