//! `MVF1` motion sidecar.
//!
//! Layout (little-endian): magic `MVF1`, `u8` kind, `u16` grid size,
//! `u16` points (or blocks) in x, `u16` in y, then one `(i8 dx, i8 dy)`
//! pair per point in row-major order.
//!
//! Kinds: 0 triangle mesh, 1 quadrilateral mesh, 2 blocks (grid size is
//! the block size), 3 no compensation (all dimensions zero, no vectors).

use std::fs;
use std::path::{Path, PathBuf};

use crate::compensation::Compensator;
use crate::error::{Error, Result};
use crate::estimation::BlockMotion;
use crate::mesh::{MeshMotion, MotionVector, Topology};

pub const MAGIC: &[u8; 4] = b"MVF1";
const HEADER_LEN: usize = 11;

const KIND_TRIANGLE: u8 = 0;
const KIND_QUAD: u8 = 1;
const KIND_BLOCK: u8 = 2;
const KIND_NONE: u8 = 3;

/// `<stem>.pair<t>.mvf`
pub fn pair_path(stem: &Path, pair: usize) -> PathBuf {
    let mut name = stem.as_os_str().to_owned();
    name.push(format!(".pair{pair}.mvf"));
    PathBuf::from(name)
}

pub fn encode(comp: &Compensator) -> Result<Vec<u8>> {
    let (kind, grid, nx, ny, vectors): (u8, usize, usize, usize, &[MotionVector]) = match comp {
        Compensator::None => (KIND_NONE, 0, 0, 0, &[]),
        Compensator::Mesh(m) => (
            match m.topology() {
                Topology::Triangle => KIND_TRIANGLE,
                Topology::Quadrilateral => KIND_QUAD,
            },
            m.grid_size(),
            m.points_x(),
            m.points_y(),
            m.vectors(),
        ),
        Compensator::Block(b) => (
            KIND_BLOCK,
            b.block_size(),
            b.blocks_x(),
            b.blocks_y(),
            b.vectors(),
        ),
    };
    let to_u16 = |v: usize| {
        u16::try_from(v).map_err(|_| Error::Range(format!("{v} does not fit the u16 header")))
    };
    let mut out = Vec::with_capacity(HEADER_LEN + 2 * vectors.len());
    out.extend_from_slice(MAGIC);
    out.push(kind);
    out.extend_from_slice(&to_u16(grid)?.to_le_bytes());
    out.extend_from_slice(&to_u16(nx)?.to_le_bytes());
    out.extend_from_slice(&to_u16(ny)?.to_le_bytes());
    for v in vectors {
        for c in [v.dx, v.dy] {
            let b = i8::try_from(c)
                .map_err(|_| Error::Range(format!("vector component {c} does not fit i8")))?;
            out.push(b as u8);
        }
    }
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<Compensator> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(Error::format("not an MVF1 sidecar"));
    }
    let kind = bytes[4];
    let u16_at = |k: usize| u16::from_le_bytes([bytes[k], bytes[k + 1]]) as usize;
    let (grid, nx, ny) = (u16_at(5), u16_at(7), u16_at(9));
    let body = &bytes[HEADER_LEN..];
    if body.len() != 2 * nx * ny {
        return Err(Error::format(format!(
            "MVF1 body has {} bytes, expected {}",
            body.len(),
            2 * nx * ny
        )));
    }
    let vectors: Vec<MotionVector> = body
        .chunks_exact(2)
        .map(|c| MotionVector::new(c[0] as i8 as i32, c[1] as i8 as i32))
        .collect();
    match kind {
        KIND_NONE if nx == 0 && ny == 0 => Ok(Compensator::None),
        KIND_TRIANGLE => Ok(Compensator::Mesh(MeshMotion::from_parts(
            grid,
            nx,
            ny,
            Topology::Triangle,
            vectors,
        )?)),
        KIND_QUAD => Ok(Compensator::Mesh(MeshMotion::from_parts(
            grid,
            nx,
            ny,
            Topology::Quadrilateral,
            vectors,
        )?)),
        KIND_BLOCK => Ok(Compensator::Block(BlockMotion::from_parts(
            grid, nx, ny, vectors,
        )?)),
        _ => Err(Error::format(format!("unknown MVF1 kind {kind}"))),
    }
}

pub fn write(comp: &Compensator, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode(comp)?)?;
    Ok(())
}

pub fn read(path: impl AsRef<Path>) -> Result<Compensator> {
    decode(&fs::read(path)?)
}

/// Side-information size of a compensator; zero when there is no motion.
pub fn side_info_bytes(comp: &Compensator) -> Result<usize> {
    match comp {
        Compensator::None => Ok(0),
        _ => Ok(encode(comp)?.len()),
    }
}
