//! Possibly overlapping sets of communities.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Communities as strictly sorted node lists, with a node -> communities index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    node_count: usize,
    communities: Vec<Vec<usize>>,
    membership: Vec<Vec<usize>>,
}

impl Cover {
    /// Sorts each community; rejects empty communities, repeated nodes
    /// inside one community and out-of-range ids.
    pub fn new(node_count: usize, mut communities: Vec<Vec<usize>>) -> Result<Self> {
        for (k, c) in communities.iter_mut().enumerate() {
            if c.is_empty() {
                return Err(Error::Argument(format!("community {k} is empty")));
            }
            c.sort_unstable();
            if let Some(w) = c.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Argument(format!("node {} repeated in community {k}", w[0])));
            }
            if let Some(&last) = c.last() {
                if last >= node_count {
                    return Err(Error::NodeOutOfRange { node: last, node_count });
                }
            }
        }
        let mut membership = vec![Vec::new(); node_count];
        for (k, c) in communities.iter().enumerate() {
            for &v in c {
                membership[v].push(k);
            }
        }
        Ok(Cover {
            node_count,
            communities,
            membership,
        })
    }

    /// Crisp labels as a cover with one community per label.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut groups: alloc::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (v, &l) in labels.iter().enumerate() {
            groups.entry(l).or_default().push(v);
        }
        let mut communities: Vec<Vec<usize>> = groups.into_values().collect();
        communities.sort_unstable_by_key(|c| c[0]);
        Cover::new(labels.len(), communities).expect("labels always form a valid cover")
    }

    pub fn from_partition(p: &Partition) -> Self {
        Cover::new(p.node_count(), p.communities()).expect("partitions always form a valid cover")
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.communities.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    #[inline]
    pub fn communities(&self) -> &[Vec<usize>] {
        &self.communities
    }

    pub fn into_communities(self) -> Vec<Vec<usize>> {
        self.communities
    }

    /// Ids of the communities containing `node`.
    #[inline]
    pub fn memberships(&self, node: usize) -> &[usize] {
        &self.membership[node]
    }

    /// Whether no node belongs to two communities.
    pub fn is_disjoint(&self) -> bool {
        self.membership.iter().all(|m| m.len() <= 1)
    }

    /// Crisp labels when every node is in exactly one community.
    pub fn as_labels(&self) -> Option<Vec<usize>> {
        self.membership
            .iter()
            .map(|m| if m.len() == 1 { Some(m[0]) } else { None })
            .collect()
    }

    /// Same communities regardless of order.
    pub fn same_communities(&self, other: &Cover) -> bool {
        let mut a = self.communities.clone();
        let mut b = other.communities.clone();
        a.sort_unstable();
        b.sort_unstable();
        self.node_count == other.node_count && a == b
    }
}

/// Whether every node of `inner` is in `outer`. Both must be sorted.
pub fn encompasses(outer: &[usize], inner: &[usize]) -> bool {
    if inner.len() > outer.len() {
        return false;
    }
    let mut it = outer.iter();
    'next: for &x in inner {
        for &y in it.by_ref() {
            if y == x {
                continue 'next;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

/// Size of the intersection of two sorted lists.
pub fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Sorted union of two sorted lists.
pub fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
