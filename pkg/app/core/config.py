from pydantic_settings import BaseSettings, SettingsConfigDict # Importa classes chave da biblioteca 'pydantic-settings'.
                                                              # - BaseSettings: classe base das configurações, carregadas
                                                              #                 automaticamente das variáveis de ambiente.
                                                              # - SettingsConfigDict: configura o comportamento da BaseSettings.
from dotenv import load_dotenv          # Carrega pares CHAVE=VALOR de um arquivo .env para o ambiente do processo.

# Carrega as variáveis de ambiente do arquivo .env (se existir).
# Deve rodar antes da criação de 'settings' para que os valores do .env sejam vistos.
load_dotenv()


class Settings(BaseSettings):
    """
    Configurações do classificador de discos ribbon, lidas de variáveis de ambiente.
    Todos os campos têm valor padrão: a ferramenta funciona sem nenhum .env,
    e cada variável definida no ambiente sobrescreve o padrão correspondente.
    """
    model_config = SettingsConfigDict(case_sensitive=True) # Os nomes das variáveis devem bater exatamente (maiúsculas).

    # --- Configurações Gerais do Projeto ---
    PROJECT_NAME: str = "Classificador de Discos G-Homotopy Ribbon"
    PROJECT_DESCRIPTION: str = (
        "Álgebra exata e numérica certificada para módulo de Alexander, forma de Blanchfield, "
        "lagrangianos e assinaturas de Levine-Tristram de nós de gênero 1."
    )
    PROJECT_VERSION: str = "1.0.0"

    # Nível de log padrão ('DEBUG', 'INFO', 'WARNING', 'ERROR'). O CLI pode baixar com -v/-vv.
    LOG_LEVEL: str = "WARNING"

    # --- Precisão da aritmética intervalar ---
    # Bits fracionários iniciais; o laço de certificação dobra até o teto.
    DEFAULT_PRECISION_BITS: int = 64
    MAX_PRECISION_BITS: int = 4096

    # --- Busca de geradores do módulo de Alexander ---
    # Vetores de coordenadas com entradas a + b*t (largura <= 2), coeficientes em [-4, 4].
    GENERATOR_SEARCH_COEFF_BOUND: int = 4
    GENERATOR_SEARCH_WIDTH: int = 2
    GENERATOR_SEARCH_MAX_CANDIDATES: int = 200_000

    # Número de threads para os dois ramos (um por lagrangiano) da classificação.
    MAX_WORKERS: int = 2


# Instância única, importada pelos demais módulos.
settings = Settings()
