import hashlib
import json
import logging
from typing import Any, Dict, Optional

from cachetools import LRUCache, TTLCache

from ...models.config import Config

logger = logging.getLogger(__name__)

SYSTEM_KIND = "linear-system"


class CacheService:
    """
    Cache de resultados de sistemas lineares.

    Funcionalidades:
    - TTLCache (cachetools) ou LRUCache sem expiração, conforme CACHE_TYPE
    - Chave = md5 do JSON canônico do sistema (grau, pontos, multiplicidades, tangentes)
    - Uma entrada só com a dimensão é substituída quando um membro é pedido depois
    - Métricas de hit/miss para debug

    Os valores guardados são funções puras da chave: o cache nunca altera
    resultados, só evita recomputar postos.
    """

    def __init__(self, config: Optional[Dict] = None):
        cache_config = config or Config.get_cache_config()

        self.cache_type = cache_config["cache_type"]
        self.default_ttl = cache_config["default_ttl"]
        self.max_size = cache_config["max_size"]

        self.stats = {"hits": 0, "misses": 0, "stores": 0, "upgrades": 0}

        if self.cache_type == "memory":
            self._cache = TTLCache(maxsize=self.max_size, ttl=self.default_ttl)
        elif self.cache_type == "lru":
            self._cache = LRUCache(maxsize=self.max_size)
        else:
            raise ValueError(f"Cache type '{self.cache_type}' not supported")
        logger.debug(f"Initialized {self.cache_type} cache, maxsize={self.max_size}")

    @staticmethod
    def generate_key(kind: str, payload: Dict[str, Any]) -> str:
        """Chave estável: md5 do JSON canônico"""
        content = f"{kind}:{json.dumps(payload, sort_keys=True)}"
        return hashlib.md5(content.encode()).hexdigest()

    def lookup(self, payload: Dict[str, Any], need_member: bool = False) -> Optional[Any]:
        """
        Busca o resultado de um sistema.

        Uma entrada sem membro não serve quando ``need_member`` é pedido e o
        sistema é não vazio; conta como miss.
        """
        key = self.generate_key(SYSTEM_KIND, payload)
        result = self._cache.get(key)
        if result is not None and (not need_member or result.empty or result.witness is not None):
            self.stats["hits"] += 1
            logger.debug(f"Cache HIT {key[:8]} (dim {result.dim})")
            return result
        self.stats["misses"] += 1
        return None

    def store(self, payload: Dict[str, Any], result: Any) -> None:
        key = self.generate_key(SYSTEM_KIND, payload)
        if key in self._cache:
            self.stats["upgrades"] += 1
        self._cache[key] = result
        self.stats["stores"] += 1

    def get_stats(self) -> Dict[str, Any]:
        """Retorna estatísticas do cache para debug"""
        total = self.stats["hits"] + self.stats["misses"]
        return {
            "cache_type": self.cache_type,
            "max_size": self.max_size,
            "current_size": len(self._cache),
            **self.stats,
            "hit_rate_percent": round(self.stats["hits"] / total * 100, 2) if total else 0,
            "total_requests": total,
        }

    def clear(self) -> None:
        self._cache.clear()
        logger.debug("Cache cleared")


_default_cache: Optional[CacheService] = None


def get_cache() -> CacheService:
    """Instância compartilhada do processo"""
    global _default_cache
    if _default_cache is None:
        _default_cache = CacheService()
    return _default_cache
