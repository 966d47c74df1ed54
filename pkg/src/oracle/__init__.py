# -*- coding: utf-8 -*-
"""
鞍点参照模块

二次实例的KKT精确解、次梯度证书与随机实例生成。
"""
