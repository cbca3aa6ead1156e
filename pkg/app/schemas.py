"""
统一响应模型
"""

from typing import Generic, TypeVar, Optional, Any, List
from pydantic import BaseModel, Field


T = TypeVar("T")


class ApiResponse(BaseModel, Generic[T]):
    """
    统一 API 响应格式

    Attributes:
        code: 响应码
        message: 响应消息
        data: 响应数据
    """

    code: int = Field(200, description="响应码")
    message: str = Field("success", description="响应消息")
    data: Optional[T] = Field(None, description="响应数据")

    @classmethod
    def success(cls, data: Any = None, message: str = "success") -> "ApiResponse[T]":
        """成功响应"""
        return cls(code=200, message=message, data=data)

    @classmethod
    def error(cls, code: int, message: str, data: Any = None) -> "ApiResponse[T]":
        """错误响应"""
        return cls(code=code, message=message, data=data)


# 常用的响应码定义
class ResponseCode:
    """响应码常量"""

    # 成功
    SUCCESS = 200

    # 客户端错误
    BAD_REQUEST = 400
    NOT_FOUND = 404
    VALIDATION_ERROR = 400

    # 服务器错误
    INTERNAL_ERROR = 500

    # 业务错误码
    ERROR_GRAPH_FORMAT = 1001
    ERROR_SIZE_MISMATCH = 1002
    ERROR_ISOLATED_VERTEX = 1003
    ERROR_MAX_DEGREE_EXCEEDED = 1004
    ERROR_TOO_MANY_MISSING_EDGES = 1005
    ERROR_NOT_A_BIJECTION = 1006
    ERROR_INSTANCE_TOO_LARGE = 1007
    ERROR_PARAMETER_OUT_OF_RANGE = 1008
    ERROR_UNKNOWN_MODEL_SPEC = 1009
    ERROR_VERTEX_OUT_OF_RANGE = 1010
    ERROR_GUARANTEE_VIOLATION = 1011
    ERROR_HYPOTHESIS = 1012


# ========== 图数据载荷 ==========


class GraphPayload(BaseModel):
    """
    简单图载荷

    Attributes:
        n: 顶点数
        edges: 边列表，每条边为 [u, v]
    """

    n: int = Field(..., ge=1, description="顶点数")
    edges: List[List[int]] = Field(default_factory=list, description="边列表 [[u, v], ...]")


class HypergraphPayload(BaseModel):
    """3-一致超图载荷"""

    n: int = Field(..., ge=1, description="顶点数")
    edges: List[List[int]] = Field(default_factory=list, description="超边列表 [[a, b, c], ...]")
