use std::borrow::Borrow;
use std::hash::Hash;
use std::num::NonZeroUsize;

use indexmap::IndexMap;

/// Least-recently-used map. Entries are kept in recency order, oldest first.
#[derive(Debug)]
pub(crate) struct LruCache<K, V> {
    map: IndexMap<K, V>,
    capacity: NonZeroUsize,
}

impl<K: Hash + Eq, V> LruCache<K, V> {
    pub fn new(capacity: NonZeroUsize) -> Self {
        LruCache { map: IndexMap::new(), capacity }
    }

    pub fn get<Q>(&mut self, key: &Q) -> Option<&V>
    where
        K: Borrow<Q>,
        Q: Hash + Eq + ?Sized,
    {
        let i = self.map.get_index_of(key)?;
        let last = self.map.len() - 1;
        self.map.move_index(i, last);
        self.map.get_index(last).map(|(_, v)| v)
    }

    pub fn put(&mut self, key: K, value: V) {
        self.map.shift_remove(&key);
        if self.map.len() == self.capacity.get() {
            self.map.shift_remove_index(0);
        }
        self.map.insert(key, value);
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn clear(&mut self) {
        self.map.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evicts_least_recent() {
        let mut c = LruCache::new(NonZeroUsize::new(2).unwrap());
        c.put("a", 1);
        c.put("b", 2);
        assert_eq!(c.get(&"a"), Some(&1));
        c.put("c", 3);
        assert_eq!(c.get(&"b"), None);
        assert_eq!(c.get(&"a"), Some(&1));
        assert_eq!(c.get(&"c"), Some(&3));
        c.put("a", 10);
        assert_eq!(c.len(), 2);
        assert_eq!(c.get(&"a"), Some(&10));
    }
}
