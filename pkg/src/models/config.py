import os
from typing import Dict, Any
from dotenv import load_dotenv

# Carregar variáveis de ambiente
load_dotenv()


class Config:
    """
    Configuração centralizada para o cremona-lines.

    Inclui configurações para:
    - Aleatoriedade reprodutível (seed, limite das coordenadas)
    - Álgebra linear (primo modular, confirmação exata)
    - Busca de contrações (profundidade, largura)
    - Cache de dimensões de sistemas lineares
    - Logging e formato de saída
    """

    # === RANDOMNESS ===

    CREMONA_SEED = int(os.getenv("CREMONA_SEED", 1))
    RANDOM_COORD_BOUND = int(os.getenv("RANDOM_COORD_BOUND", 10_000))
    REALIZE_MAX_RETRIES = int(os.getenv("REALIZE_MAX_RETRIES", 25))

    # === LINEAR ALGEBRA ===

    # 2^31 - 1: produtos cabem em int64
    MODULAR_PRIME = int(os.getenv("MODULAR_PRIME", 2_147_483_647))
    EXACT_CONFIRM = os.getenv("EXACT_CONFIRM", "true").lower() in ("1", "true", "yes")

    # === CLASSIFIER ===

    KODAIRA_BOUND = int(os.getenv("KODAIRA_BOUND", 12))
    SEARCH_MAX_DEPTH = int(os.getenv("SEARCH_MAX_DEPTH", 6))
    SEARCH_MAX_WIDTH = int(os.getenv("SEARCH_MAX_WIDTH", 12))

    # === CACHE ===

    CACHE_TYPE = os.getenv("CACHE_TYPE", "memory")
    CACHE_DEFAULT_TTL = int(os.getenv("CACHE_DEFAULT_TTL", 3600))
    CACHE_MAX_SIZE = int(os.getenv("CACHE_MAX_SIZE", 4096))

    # === LOGGING / OUTPUT ===

    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    LOG_FILE = os.getenv("LOG_FILE", "")
    OUTPUT_FORMAT = os.getenv("OUTPUT_FORMAT", "text")

    @classmethod
    def get_random_config(cls) -> Dict[str, Any]:
        """Retorna configurações de aleatoriedade"""
        return {
            "seed": cls.CREMONA_SEED,
            "coord_bound": cls.RANDOM_COORD_BOUND,
            "max_retries": cls.REALIZE_MAX_RETRIES,
        }

    @classmethod
    def get_linear_algebra_config(cls) -> Dict[str, Any]:
        """Retorna configurações do cálculo de postos"""
        return {
            "prime": cls.MODULAR_PRIME,
            "exact_confirm": cls.EXACT_CONFIRM,
        }

    @classmethod
    def get_search_config(cls) -> Dict[str, Any]:
        """Retorna limites da busca e do teste de Kodaira"""
        return {
            "kodaira_bound": cls.KODAIRA_BOUND,
            "max_depth": cls.SEARCH_MAX_DEPTH,
            "max_width": cls.SEARCH_MAX_WIDTH,
        }

    @classmethod
    def get_cache_config(cls) -> Dict[str, Any]:
        """Retorna configurações específicas do cache"""
        return {
            "cache_type": cls.CACHE_TYPE,
            "default_ttl": cls.CACHE_DEFAULT_TTL,
            "max_size": cls.CACHE_MAX_SIZE,
        }

    @classmethod
    def validate_config(cls) -> Dict[str, Any]:
        """Valida configurações críticas e retorna status"""
        errors = []
        warnings = []

        if cls.MODULAR_PRIME < 3 or cls.MODULAR_PRIME >= 2**31:
            errors.append("MODULAR_PRIME must be an odd prime below 2^31")

        if cls.RANDOM_COORD_BOUND < 10:
            errors.append("RANDOM_COORD_BOUND too small for general position")

        if cls.KODAIRA_BOUND < 1:
            errors.append("KODAIRA_BOUND must be positive")

        if cls.SEARCH_MAX_DEPTH < 1 or cls.SEARCH_MAX_WIDTH < 1:
            errors.append("Search budget must be positive")

        if cls.LOG_LEVEL.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            errors.append(f"Unknown LOG_LEVEL '{cls.LOG_LEVEL}'")

        if cls.OUTPUT_FORMAT not in ("text", "json"):
            errors.append(f"Unknown OUTPUT_FORMAT '{cls.OUTPUT_FORMAT}'")

        if cls.CACHE_TYPE not in ("memory", "lru"):
            errors.append(f"Unknown CACHE_TYPE '{cls.CACHE_TYPE}'")

        if not cls.EXACT_CONFIRM:
            warnings.append(
                "EXACT_CONFIRM disabled - nonempty verdicts rely on modular ranks only"
            )

        if cls.SEARCH_MAX_DEPTH > 8:
            warnings.append("Search depth above 8 - runtime grows quickly")

        if cls.REALIZE_MAX_RETRIES < 3:
            warnings.append("Few realization retries - unlucky seeds may fail")

        return {
            "valid": len(errors) == 0,
            "errors": errors,
            "warnings": warnings,
            "config_source": "environment" if os.getenv("CREMONA_SEED") else "defaults",
        }
