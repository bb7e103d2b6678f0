//! Builders for the example linkages and frameworks.

mod classic;
mod gallery;
mod hinge;
mod paneled;

pub use classic::{
    cadelniza, cadelniza_dilation_flex, double_arrowhead, double_arrowhead_with,
    floor_circumradius, roof, roofed_cadelniza, roofing_adapted_basis, roofing_alternative,
    roofing_preset, roofing_series, CadelnizaParams,
};
pub use gallery::{
    deleted_edge, gallery_lk, lk_closed_form, lk_positions, LkClosedForm, LkParams,
    PERTURBATION_SEED,
};
pub use hinge::{
    angle_between, attach_hinge, hinge_attach, relative_to_scaffold, BarGraph, HingeAttachment,
    HingeSpec, HINGE_ANGLE_TOL,
};
pub use paneled::{
    altitude_directions, default_reduction_point, paneled_simplex, reduce_to_one_dof,
    solve_compatible_velocity, PaneledSimplex, Reduction, ScaffoldedLinkage, MAX_CONDITION,
};

use crate::error::Result;
use crate::geometry::{FiniteLinkage, PeriodicFramework};

/// Named members of the gallery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GallerySelector {
    DoubleArrowhead,
    PaneledSimplex(usize),
    Cadelniza(CadelnizaParams),
    RoofedCadelniza,
    Lk(LkParams),
}

/// A gallery member: roofed frameworks only exist in periodic form.
#[derive(Debug, Clone, PartialEq)]
pub enum GalleryItem {
    Linkage(FiniteLinkage),
    Framework(PeriodicFramework),
}

impl GallerySelector {
    pub fn build(&self) -> Result<GalleryItem> {
        Ok(match self {
            GallerySelector::DoubleArrowhead => GalleryItem::Linkage(double_arrowhead()),
            GallerySelector::PaneledSimplex(d) => {
                GalleryItem::Linkage(paneled_simplex(*d)?.scaffolded.linkage)
            }
            GallerySelector::Cadelniza(p) => GalleryItem::Linkage(cadelniza(*p)?),
            GallerySelector::RoofedCadelniza => GalleryItem::Framework(roofed_cadelniza()?),
            GallerySelector::Lk(p) => GalleryItem::Linkage(gallery_lk(*p)?),
        })
    }

    /// Every selector used by the acceptance suite, in a fixed order.
    pub fn standard() -> Vec<GallerySelector> {
        let mut out = vec![
            GallerySelector::DoubleArrowhead,
            GallerySelector::PaneledSimplex(2),
            GallerySelector::PaneledSimplex(3),
            GallerySelector::Cadelniza(CadelnizaParams::new(3)),
            GallerySelector::RoofedCadelniza,
        ];
        out.extend((3..=6).map(|k| GallerySelector::Lk(LkParams::new(k))));
        out
    }

    pub fn name(&self) -> String {
        match self {
            GallerySelector::DoubleArrowhead => "double-arrowhead".into(),
            GallerySelector::PaneledSimplex(d) => format!("paneled-simplex-{d}"),
            GallerySelector::Cadelniza(p) => format!("cadelniza-{}", p.dim),
            GallerySelector::RoofedCadelniza => "roofed-cadelniza".into(),
            GallerySelector::Lk(p) => format!("lk-{}", p.k),
        }
    }
}
