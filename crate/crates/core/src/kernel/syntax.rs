//! Core terms. Variables are de Bruijn indices into a context whose entries
//! are typed variables, cube variables, abstract cube sorts and tope
//! families. Topes and cube terms reuse the tope layer's syntax; inside a
//! shape or subtope, [`CubeTerm::Arg`] stands for the bound cube point.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::tope::{Cube, CubeTerm, Tope};

pub type RTerm = Arc<Term>;
pub type Name = Arc<str>;

#[derive(Debug, Clone)]
pub enum Term {
    Var(usize),
    Global(Arc<GlobalDef>, Arc<[SchemaArg]>),
    Universe(u32),
    Pi(Name, RTerm, RTerm),
    Lam(Name, RTerm),
    App(RTerm, RTerm),
    Sigma(Name, RTerm, RTerm),
    Pair(RTerm, RTerm),
    Fst(RTerm),
    Snd(RTerm),
    /// `lhs =_{ty} rhs`
    Id(RTerm, RTerm, RTerm),
    Refl(RTerm),
    J(Box<JTerm>),
    Ext(Box<ExtTerm>),
    CubeLam(Name, RTerm),
    CubeApp(RTerm, CubeTerm),
    /// The type of points of a shape.
    ShapeType(Cube, Tope),
    RecOr(Vec<(Tope, RTerm)>),
    RecBot,
}

/// `J` for `path : lhs =_{ty} rhs` with motive `C : Π y. lhs = y → U`.
#[derive(Debug, Clone)]
pub struct JTerm {
    pub ty: RTerm,
    pub lhs: RTerm,
    pub motive: RTerm,
    pub base: RTerm,
    pub rhs: RTerm,
    pub path: RTerm,
}

/// `⟨Π (name : {cube | shape}) → family | subtope ↦ partial⟩`; `family`
/// and `partial` bind the cube point.
#[derive(Debug, Clone)]
pub struct ExtTerm {
    pub name: Name,
    pub cube: Cube,
    pub shape: Tope,
    pub family: RTerm,
    pub subtope: Tope,
    pub partial: RTerm,
}

/// An argument for a schematic parameter of a global.
#[derive(Debug, Clone)]
pub enum SchemaArg {
    Sort(Cube),
    /// A tope family, as a tope over [`CubeTerm::Arg`].
    Family(Tope),
}

#[derive(Debug, Clone)]
pub enum SchemaParamKind {
    Sort,
    Family { domain: Cube, bound: Option<Tope> },
}

#[derive(Debug, Clone)]
pub struct SchemaParam {
    pub name: Name,
    pub kind: SchemaParamKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlobalKind {
    Definition,
    Postulate,
}

/// A checked global. Its type and value live in the context of its schema
/// parameters.
#[derive(Debug)]
pub struct GlobalDef {
    pub uid: u64,
    pub name: Name,
    pub module: Name,
    pub kind: GlobalKind,
    pub schema: Vec<SchemaParam>,
    pub ty: RTerm,
    pub value: Option<RTerm>,
}

static NEXT_UID: AtomicU64 = AtomicU64::new(1);

impl GlobalDef {
    pub fn new(
        name: Name,
        module: Name,
        kind: GlobalKind,
        schema: Vec<SchemaParam>,
        ty: RTerm,
        value: Option<RTerm>,
    ) -> GlobalDef {
        GlobalDef {
            uid: NEXT_UID.fetch_add(1, Ordering::Relaxed),
            name,
            module,
            kind,
            schema,
            ty,
            value,
        }
    }
}

pub fn name(s: &str) -> Name {
    Arc::from(s)
}
