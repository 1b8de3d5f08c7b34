//! Time integrations of the registered experiments.

pub mod advection1d;
pub mod diffusion1d;
pub mod diffusion2d;
pub mod rotation;

use std::sync::Arc;

use sldg_core::quadbasis::NodalBasis;

use crate::config::Setup;
use crate::error::Result;

pub(crate) fn basis(s: &Setup) -> Result<Arc<NodalBasis>> {
    Ok(Arc::new(NodalBasis::new(s.k)?))
}
